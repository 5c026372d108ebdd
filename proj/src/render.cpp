#include "crmot/render.hpp"

#include <stdexcept>
#include <vector>

#include "crmot/vocabulary.hpp"

namespace crmot {

namespace {

bool is_null(const std::string& v) { return v == AttributeSet::kNull; }

std::string with_article(const std::string& phrase) {
  static const std::string_view kVowels = "aeiou";
  const bool vowel = !phrase.empty() && kVowels.find(phrase.front()) != std::string_view::npos;
  return (vowel ? "an " : "a ") + phrase;
}

std::string strip_prefix(const std::string& s, std::string_view prefix) {
  return s.starts_with(prefix) ? s.substr(prefix.size()) : s;
}

std::string strip_article(const std::string& s) {
  if (s.starts_with("an ")) return s.substr(3);
  if (s.starts_with("a ")) return s.substr(2);
  return s;
}

std::string join_and(const std::vector<std::string>& parts, const char* separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += (i + 1 == parts.size()) ? " and " : separator;
    out += parts[i];
  }
  return out;
}

// Colour plus noun with an indefinite article; the noun alone if no colour.
std::string colored_noun(const std::string& color, const std::string& noun) {
  return with_article(is_null(color) ? noun : color + " " + noun);
}

std::string render_sentence(const AttributeSet& attrs) {
  std::string text = "A person";

  const std::string& head_color = attrs.get("headwear_color");
  const std::string& head_style = attrs.get("headwear_style");
  if (!is_null(head_style)) {
    text += " with " + colored_noun(head_color, strip_prefix(head_style, "with "));
  } else if (!is_null(head_color)) {
    text += " with " + colored_noun(head_color, "hat");
  }

  std::vector<std::string> clothing;
  if (const auto& coat = attrs.get("coat"); !is_null(coat)) clothing.push_back(with_article(coat));
  if (const auto& trousers = attrs.get("trousers"); !is_null(trousers)) clothing.push_back(trousers);
  if (const auto& shoes = attrs.get("shoes"); !is_null(shoes)) clothing.push_back(shoes);
  if (!clothing.empty()) text += " in " + join_and(clothing, ", ");

  std::vector<std::string> actions;
  const std::string& item_color = attrs.get("held_item_color");
  const std::string& item_style = attrs.get("held_item_style");
  if (!is_null(item_style)) {
    actions.push_back("holding " + colored_noun(item_color, strip_article(item_style)));
  } else if (!is_null(item_color)) {
    actions.push_back("holding " + colored_noun(item_color, "item"));
  }
  if (const auto& ride = attrs.get("transportation"); !is_null(ride)) {
    actions.push_back("riding " + ride);
  }
  if (!actions.empty()) text += ", " + join_and(actions, ", ");

  return text + ".";
}

std::string render_list(const AttributeSet& attrs) {
  std::string text = "person";
  for (std::string_view category : kAttributeCategories) {
    const std::string& v = attrs.get(std::string(category));
    if (!is_null(v)) text += "; " + v;
  }
  return text;
}

}  // namespace

std::string render_description(const AttributeSet& attrs, std::string_view template_id) {
  if (template_id == "sentence") return render_sentence(attrs);
  if (template_id == "list") return render_list(attrs);
  throw std::invalid_argument("unknown description template '" + std::string(template_id) + "'");
}

}  // namespace crmot
