#include "chemreason/element.h"

#include <array>

namespace chemreason {
namespace {

constexpr std::array<std::string_view, kMaxAtomicNumber + 1> kSymbols = {
  "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
  "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
  "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
  "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
  "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
  "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
  "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
  "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
  "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array<int, 1> kValenceB = { 3 };
constexpr std::array<int, 1> kValenceC = { 4 };
constexpr std::array<int, 2> kValenceN = { 3, 5 };
constexpr std::array<int, 1> kValenceO = { 2 };
constexpr std::array<int, 2> kValenceP = { 3, 5 };
constexpr std::array<int, 3> kValenceS = { 2, 4, 6 };
constexpr std::array<int, 1> kValenceHalogen = { 1 };

}  // namespace

std::string_view element_symbol(int atomic_number) {
  if (atomic_number < 0 || atomic_number > kMaxAtomicNumber)
    return {};
  return kSymbols[atomic_number];
}

std::optional<int> atomic_number_from_symbol(std::string_view symbol) {
  if (symbol.empty())
    return std::nullopt;
  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kSymbols[z] == symbol)
      return z;
  }
  return std::nullopt;
}

bool is_organic_subset(int atomic_number) {
  switch (atomic_number) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 9:
  case 15:
  case 16:
  case 17:
  case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

bool may_be_aromatic(int atomic_number) {
  switch (atomic_number) {
  case 5:   // B
  case 6:   // C
  case 7:   // N
  case 8:   // O
  case 15:  // P
  case 16:  // S
  case 33:  // As
  case 34:  // Se
    return true;
  default:
    return false;
  }
}

std::span<const int> default_valences(int atomic_number) {
  switch (atomic_number) {
  case 5:
    return kValenceB;
  case 6:
    return kValenceC;
  case 7:
    return kValenceN;
  case 8:
    return kValenceO;
  case 15:
    return kValenceP;
  case 16:
    return kValenceS;
  case 9:
  case 17:
  case 35:
  case 53:
    return kValenceHalogen;
  default:
    return {};
  }
}

}  // namespace chemreason
