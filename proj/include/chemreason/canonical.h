#ifndef CHEMREASON_CANONICAL_H_
#define CHEMREASON_CANONICAL_H_

#include <string>
#include <vector>

#include "chemreason/molgraph.h"

namespace chemreason {

// Canonical atom ranking (a permutation of 0..n-1).
//
// Atoms are partitioned by their invariants (element, charge, isotope, degree,
// hydrogen count, aromaticity, ring membership, class) and the partition is
// refined by neighbor ranks until stable. Remaining ties are broken by
// individualizing one member of the lowest tied class and refining again.
// Without stereo descriptors the first member is taken; with stereo present
// every member is tried and the ranking yielding the smallest SMILES wins, so
// mirror-related choices cannot leak the input order into the result.
std::vector<int> canonical_ranks(const MolGraph &mol);

std::string canonical_smiles(const MolGraph &mol);

// Atoms renumbered in canonical output order.
MolGraph canonicalize(const MolGraph &mol);

// Same canonical form, atom for atom and bond for bond, stereo included.
bool molecules_equal(const MolGraph &a, const MolGraph &b);

}  // namespace chemreason

#endif  // CHEMREASON_CANONICAL_H_
