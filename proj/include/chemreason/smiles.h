#ifndef CHEMREASON_SMILES_H_
#define CHEMREASON_SMILES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemreason/molgraph.h"

namespace chemreason {

// Reads a SMILES string. Accepted: organic-subset and bracket atoms (isotope,
// aromatic symbol, @/@@, H count, charge, class), bonds - = # : / \, ring
// closures including %nn, branches, and '.' fragments. Throws ParseError.
MolGraph parse_smiles(std::string_view text);

struct ReactionGraph {
  std::vector<MolGraph> reactants;
  std::vector<MolGraph> agents;
  std::vector<MolGraph> products;

  bool well_formed() const { return !reactants.empty() && !products.empty(); }
};

// "reactants>agents>products"; each dot-separated member becomes its own
// graph. Parse errors are rethrown with the role and member position added.
ReactionGraph parse_reaction(std::string_view text);

// Splits a reaction SMILES into its three role fields without parsing them.
// Throws ParseError(kWrongSeparatorCount).
std::vector<std::string> split_reaction_roles(std::string_view text);

// Splits on top-level '.' (dots inside brackets are not separators).
std::vector<std::string> split_fragments(std::string_view text);

bool looks_like_reaction(std::string_view text);

struct WriteMode {
  bool random = false;
  std::uint64_t seed = 0;

  static WriteMode canonical() { return {}; }
  static WriteMode randomized(std::uint64_t seed) { return { true, seed }; }
};

std::string write_smiles(const MolGraph &mol,
                         WriteMode mode = WriteMode::canonical());

// Writes the graph traversing atoms in preference order given by `ranks`
// (lower first). `ranks` must be a permutation of 0..n-1. If `atom_order` is
// non-null it receives the atoms in the order they appear in the output.
std::string write_smiles_ranked(const MolGraph &mol, std::span<const int> ranks,
                                std::vector<int> *atom_order = nullptr);

}  // namespace chemreason

#endif  // CHEMREASON_SMILES_H_
