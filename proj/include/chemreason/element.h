#ifndef CHEMREASON_ELEMENT_H_
#define CHEMREASON_ELEMENT_H_

#include <optional>
#include <span>
#include <string_view>

namespace chemreason {

constexpr int kMaxAtomicNumber = 118;

// Symbol with conventional capitalization ("Cl"), or empty for out-of-range
// atomic numbers.
std::string_view element_symbol(int atomic_number);

std::optional<int> atomic_number_from_symbol(std::string_view symbol);

// Organic-subset elements may be written without brackets.
bool is_organic_subset(int atomic_number);

// Elements that may carry the aromatic flag (written in lowercase).
bool may_be_aromatic(int atomic_number);

// Standard valences used to derive implicit hydrogen counts for organic-subset
// atoms, ascending. Empty for elements outside the organic subset.
std::span<const int> default_valences(int atomic_number);

}  // namespace chemreason

#endif  // CHEMREASON_ELEMENT_H_
