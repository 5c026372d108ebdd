#pragma once

#include <string>
#include <string_view>

#include "crmot/datamodel.hpp"

namespace crmot {

// Deterministic description text from attributes. "null" values are left out.
//
//   "sentence": "A person with a red cap in a black coat and blue trousers,
//                holding a book and riding a bicycle."
//   "list":     "person; red cap; black coat; blue trousers; a book; a bicycle"
//
// Throws std::invalid_argument for an unknown template id.
std::string render_description(const AttributeSet& attrs,
                               std::string_view template_id = "sentence");

}  // namespace crmot
