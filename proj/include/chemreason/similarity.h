#ifndef CHEMREASON_SIMILARITY_H_
#define CHEMREASON_SIMILARITY_H_

#include <optional>
#include <string_view>

#include "chemreason/fingerprint.h"
#include "chemreason/molgraph.h"
#include "chemreason/smiles.h"

namespace chemreason {

struct StructureScore {
  double similarity = 0.0;
  // Hit at similarity 1, decided without floating-point comparison.
  bool exact = false;
  bool heavy_atoms_match = false;
};

// Whole-graph fingerprints; dot-separated fragments stay in one graph.
// exact means equal popcounts and full overlap (c == a == b).
StructureScore compare_molecules(const MolGraph &pred, const MolGraph &gt,
                                 const FingerprintParams &params = {});

// Within each role, components are greedily paired by best Tanimoto. The score
// is the sum of paired similarities over the sum across roles of
// max(predicted, expected) component counts, so extra or missing components
// count as 0. exact requires each role's components to be canonically equal
// as multisets; a non-exact result never reports similarity 1.
StructureScore compare_reactions(const ReactionGraph &pred,
                                 const ReactionGraph &gt,
                                 const FingerprintParams &params = {});

// Parses both sides and picks the molecule or reaction comparison from the
// shape of `gt`. Returns nullopt if `pred` does not parse in that shape.
// Throws ParseError if `gt` does not parse.
std::optional<StructureScore> compare_structures(
    std::string_view pred, std::string_view gt,
    const FingerprintParams &params = {});

}  // namespace chemreason

#endif  // CHEMREASON_SIMILARITY_H_
