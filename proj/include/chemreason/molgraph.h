#ifndef CHEMREASON_MOLGRAPH_H_
#define CHEMREASON_MOLGRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace chemreason {

// Tetrahedral tag. The reference neighbor order is intrinsic to the graph, not
// to any SMILES spelling: the implicit-hydrogen (or lone-pair) slot first, if
// present, followed by the neighbors in ascending atom index. kCounterClockwise
// then reads like SMILES '@' over that order, kClockwise like '@@'.
enum class Chirality : std::uint8_t {
  kNone,
  kCounterClockwise,
  kClockwise,
};

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct Atom {
  int element = 6;
  int isotope = 0;  // 0: unspecified
  int charge = 0;
  // Bracket hydrogen count. When absent, the count is derived from the
  // organic-subset valence table when the graph is constructed.
  std::optional<int> explicit_h;
  bool aromatic = false;
  Chirality chirality = Chirality::kNone;
  std::optional<int> atom_class;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;
};

// Cis/trans configuration of a double bond, stated against one reference
// substituent on each side. After construction the references are always the
// lowest-index neighbor of bond.begin and of bond.end (excluding each other),
// with begin < end. Descriptors are kept only when each end carries one or two
// further neighbors, all on single bonds.
struct DoubleBondStereo {
  int bond = 0;
  int ref_begin = 0;
  int ref_end = 0;
  bool trans = false;

  friend bool operator==(const DoubleBondStereo &,
                         const DoubleBondStereo &) = default;
};

struct Neighbor {
  int atom;
  int bond;
};

// Immutable attributed molecular graph.
//
// Construction validates the input, derives implicit hydrogen counts, runs the
// ring-based aromaticity normalization, computes ring membership, and puts
// stereo descriptors into their normalized form. Hydrogen counts are fixed
// before normalization, so a kekulized ring and its aromatic spelling end up
// with identical atoms.
class MolGraph {
public:
  MolGraph() = default;

  // Throws Error(kInvalidBond) / Error(kMalformedBracketAtom) on invalid input.
  MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
           std::vector<DoubleBondStereo> stereo = {});

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const std::vector<Atom> &atoms() const { return atoms_; }
  const Atom &atom(int i) const { return atoms_[i]; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Bond &bond(int i) const { return bonds_[i]; }
  const std::vector<DoubleBondStereo> &double_bond_stereo() const {
    return stereo_;
  }

  // Sorted by neighbor index.
  std::span<const Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }
  int degree(int atom) const {
    return static_cast<int>(adjacency_[atom].size());
  }
  int total_h(int atom) const { return hydrogens_[atom]; }
  bool in_ring(int atom) const { return ring_atom_[atom]; }
  bool bond_in_ring(int bond) const { return ring_bond_[bond]; }

  std::optional<int> find_bond(int a, int b) const;
  int other_atom(int bond, int atom) const {
    const Bond &b = bonds_[bond];
    return b.begin == atom ? b.end : b.begin;
  }

  // Atoms other than hydrogen.
  int heavy_atom_count() const;

  // Connected-component id per atom; ids numbered by lowest member index.
  std::vector<int> component_ids() const;
  int num_components() const;

  bool has_stereo() const;

  // Structural identity under the current atom numbering. Bracket-ness of
  // atoms is not part of identity; total hydrogen counts are.
  friend bool operator==(const MolGraph &a, const MolGraph &b);

private:
  void validate_and_index();
  void derive_hydrogens();
  void normalize_aromaticity();
  void compute_ring_membership();
  void normalize_stereo();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<DoubleBondStereo> stereo_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<int> hydrogens_;
  std::vector<bool> ring_atom_;
  std::vector<bool> ring_bond_;
};

// Atoms of `b` follow those of `a`.
MolGraph disjoint_union(const MolGraph &a, const MolGraph &b);

// Renumbers atoms: new index of old atom i is new_index[i]. Stereo descriptors
// are re-expressed against the new numbering.
MolGraph permute_atoms(const MolGraph &mol, std::span<const int> new_index);

// Hydrogen count the SMILES reader derives for an unbracketed atom with the
// given bonds (aromatic bonds counted as 1).
int organic_implicit_h(int element, bool aromatic, int bond_order_sum);

// Parity (0 even, 1 odd) of the permutation that maps `from` onto `to`. Both
// must hold the same distinct values.
int permutation_parity(std::span<const int> from, std::span<const int> to);

}  // namespace chemreason

#endif  // CHEMREASON_MOLGRAPH_H_
