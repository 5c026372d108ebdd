#include "crmot/vocabulary.hpp"

#include <algorithm>

namespace crmot {

namespace {

std::vector<std::string> colored(const std::string& noun) {
  static const char* kColors[] = {"white", "black", "gray",   "green",
                                  "pink",  "red",   "yellow", "blue",
                                  "orange", "purple"};
  std::vector<std::string> out;
  for (const char* c : kColors) {
    out.push_back(noun.empty() ? std::string(c) : std::string(c) + " " + noun);
  }
  out.emplace_back("null");
  return out;
}

}  // namespace

AttributeVocabulary::AttributeVocabulary(std::vector<AttributeCategory> categories)
    : categories_(std::move(categories)) {}

const AttributeVocabulary& AttributeVocabulary::standard() {
  static const AttributeVocabulary vocab({
      {"headwear_color", colored("")},
      {"headwear_style", {"with cap", "with helmet", "null"}},
      {"coat", colored("coat")},
      {"trousers", colored("trousers")},
      {"shoes", colored("shoes")},
      {"held_item_color", colored("")},
      {"held_item_style",
       {"a bag", "a plastic bag", "a handbag", "a schoolbag", "a cart", "a box",
        "a child", "a stick", "a book", "a mobile phone", "a can", "null"}},
      {"transportation", {"a bicycle", "an electric bike", "a tricycle", "null"}},
  });
  return vocab;
}

const AttributeCategory* AttributeVocabulary::find(std::string_view category) const {
  auto it = std::find_if(categories_.begin(), categories_.end(),
                         [&](const AttributeCategory& c) { return c.name == category; });
  return it == categories_.end() ? nullptr : &*it;
}

bool AttributeVocabulary::contains(std::string_view category, std::string_view word) const {
  const AttributeCategory* c = find(category);
  if (c == nullptr) return false;
  return std::find(c->words.begin(), c->words.end(), word) != c->words.end();
}

std::size_t AttributeVocabulary::word_count() const {
  std::size_t n = 0;
  for (const auto& c : categories_) n += c.words.size();
  return n;
}

}  // namespace crmot
