#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crmot {

// Attribute categories of a referring description, in canonical order.
inline constexpr std::string_view kAttributeCategories[] = {
    "headwear_color", "headwear_style",  "coat",
    "trousers",       "shoes",           "held_item_color",
    "held_item_style", "transportation",
};

struct AttributeCategory {
  std::string name;
  std::vector<std::string> words;  // includes "null"
};

class AttributeVocabulary {
 public:
  explicit AttributeVocabulary(std::vector<AttributeCategory> categories);

  // The 8-category, 74-word annotation vocabulary.
  static const AttributeVocabulary& standard();

  std::span<const AttributeCategory> categories() const { return categories_; }
  const AttributeCategory* find(std::string_view category) const;
  bool contains(std::string_view category, std::string_view word) const;
  // Sum of word-list lengths, "null" counted once per category.
  std::size_t word_count() const;

 private:
  std::vector<AttributeCategory> categories_;
};

}  // namespace crmot
