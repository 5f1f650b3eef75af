#include "chemreason/molgraph.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "chemreason/element.h"
#include "chemreason/error.h"

namespace chemreason {
namespace {

int order_weight(BondOrder order) {
  switch (order) {
  case BondOrder::kDouble:
    return 2;
  case BondOrder::kTriple:
    return 3;
  default:
    return 1;
  }
}

bool is_aromatic_ring_element(const Atom &atom) {
  return atom.charge == 0
         && (atom.element == 6 || atom.element == 7 || atom.element == 8
             || atom.element == 16);
}

// Bond-order pattern matcher where an already aromatic bond stands in for
// either a single or a double bond (fused systems get perceived ring by ring).
bool order_fits(BondOrder actual, BondOrder wanted) {
  return actual == wanted || actual == BondOrder::kAromatic;
}

std::vector<int> intrinsic_order(const MolGraph &mol, int atom,
                                 std::span<const int> renumber) {
  std::vector<int> order;
  const int h = mol.total_h(atom);
  if (h == 1 || mol.degree(atom) == 3)
    order.push_back(-1);
  for (const Neighbor &nb: mol.neighbors(atom))
    order.push_back(renumber.empty() ? nb.atom : renumber[nb.atom]);
  return order;
}

std::vector<Atom> frozen_atoms(const MolGraph &mol) {
  std::vector<Atom> atoms = mol.atoms();
  for (int i = 0; i < mol.num_atoms(); ++i)
    atoms[i].explicit_h = mol.total_h(i);
  return atoms;
}

}  // namespace

int organic_implicit_h(int element, bool aromatic, int bond_order_sum) {
  std::span<const int> valences = default_valences(element);
  if (valences.empty())
    return 0;

  int used = bond_order_sum;
  if (aromatic
      && (element == 5 || element == 6 || element == 7 || element == 15)
      && used + 1 <= valences.front()) {
    ++used;
  }
  for (int v: valences) {
    if (v >= used)
      return v - used;
  }
  return 0;
}

int permutation_parity(std::span<const int> from, std::span<const int> to) {
  const int n = static_cast<int>(from.size());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) {
    auto it = std::find(to.begin(), to.end(), from[i]);
    perm[i] = static_cast<int>(it - to.begin());
  }
  std::vector<bool> seen(n, false);
  int cycles = 0;
  for (int i = 0; i < n; ++i) {
    if (seen[i])
      continue;
    ++cycles;
    for (int j = i; !seen[j]; j = perm[j])
      seen[j] = true;
  }
  return (n - cycles) % 2;
}

MolGraph::MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
                   std::vector<DoubleBondStereo> stereo)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)),
      stereo_(std::move(stereo)) {
  validate_and_index();
  derive_hydrogens();
  normalize_aromaticity();
  compute_ring_membership();
  normalize_stereo();
}

void MolGraph::validate_and_index() {
  const int n = num_atoms();
  for (int i = 0; i < n; ++i) {
    const Atom &a = atoms_[i];
    if (a.element < 1 || a.element > kMaxAtomicNumber)
      throw Error(ErrorCode::kMalformedBracketAtom,
                  fmt::format("atom {}: invalid element {}", i, a.element));
    if (a.charge < -15 || a.charge > 15)
      throw Error(ErrorCode::kMalformedBracketAtom,
                  fmt::format("atom {}: charge {} out of range", i, a.charge));
    if (a.explicit_h && *a.explicit_h < 0)
      throw Error(ErrorCode::kMalformedBracketAtom,
                  fmt::format("atom {}: negative hydrogen count", i));
    if (a.isotope < 0 || (a.atom_class && *a.atom_class < 0))
      throw Error(ErrorCode::kMalformedBracketAtom,
                  fmt::format("atom {}: negative isotope or class", i));
    if (a.aromatic && !may_be_aromatic(a.element))
      throw Error(ErrorCode::kMalformedBracketAtom,
                  fmt::format("atom {}: {} cannot be aromatic", i,
                              element_symbol(a.element)));
  }

  // Bonds are stored with begin < end, sorted; stereo bond indices follow.
  std::vector<int> order(bonds_.size());
  std::iota(order.begin(), order.end(), 0);
  for (Bond &b: bonds_) {
    if (b.begin < 0 || b.begin >= n || b.end < 0 || b.end >= n)
      throw Error(ErrorCode::kInvalidBond, "bond endpoint out of range");
    if (b.begin == b.end)
      throw Error(ErrorCode::kInvalidBond,
                  fmt::format("atom {} bonded to itself", b.begin));
    if (b.order == BondOrder::kAromatic
        && !(atoms_[b.begin].aromatic && atoms_[b.end].aromatic))
      throw Error(ErrorCode::kInvalidBond,
                  fmt::format("aromatic bond {}-{} joins a non-aromatic atom",
                              b.begin, b.end));
  }
  auto key = [&](int i) {
    const Bond &b = bonds_[i];
    return std::minmax(b.begin, b.end);
  };
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return key(x) < key(y); });
  std::vector<Bond> sorted;
  sorted.reserve(bonds_.size());
  std::vector<int> new_pos(bonds_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Bond b = bonds_[order[k]];
    if (b.begin > b.end)
      std::swap(b.begin, b.end);
    if (!sorted.empty() && sorted.back().begin == b.begin
        && sorted.back().end == b.end)
      throw Error(ErrorCode::kInvalidBond,
                  fmt::format("duplicate bond {}-{}", b.begin, b.end));
    new_pos[order[k]] = static_cast<int>(k);
    sorted.push_back(b);
  }
  bonds_ = std::move(sorted);
  for (DoubleBondStereo &s: stereo_) {
    if (s.bond < 0 || s.bond >= num_bonds())
      throw Error(ErrorCode::kInvalidBond, "stereo bond index out of range");
    s.bond = new_pos[s.bond];
  }

  adjacency_.assign(n, {});
  for (int i = 0; i < num_bonds(); ++i) {
    adjacency_[bonds_[i].begin].push_back({ bonds_[i].end, i });
    adjacency_[bonds_[i].end].push_back({ bonds_[i].begin, i });
  }
  for (auto &adj: adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Neighbor &x, const Neighbor &y) {
      return x.atom < y.atom;
    });
  }
}

void MolGraph::derive_hydrogens() {
  hydrogens_.assign(num_atoms(), 0);
  for (int i = 0; i < num_atoms(); ++i) {
    const Atom &a = atoms_[i];
    if (a.explicit_h) {
      hydrogens_[i] = *a.explicit_h;
      continue;
    }
    int sum = 0;
    for (const Neighbor &nb: adjacency_[i])
      sum += order_weight(bonds_[nb.bond].order);
    hydrogens_[i] = organic_implicit_h(a.element, a.aromatic, sum);
  }
}

void MolGraph::normalize_aromaticity() {
  // Simple cycles of length 5 and 6, each recorded once.
  std::vector<std::vector<int>> cycles;
  std::vector<int> path;
  std::vector<bool> on_path(num_atoms(), false);
  auto extend = [&](auto &&self, int start) -> void {
    const int tail = path.back();
    const int len = static_cast<int>(path.size());
    if (len >= 5 && path[1] < tail && find_bond(tail, start)) {
      cycles.push_back(path);
    }
    if (len == 6)
      return;
    for (const Neighbor &nb: adjacency_[tail]) {
      if (nb.atom <= start || on_path[nb.atom])
        continue;
      on_path[nb.atom] = true;
      path.push_back(nb.atom);
      self(self, start);
      path.pop_back();
      on_path[nb.atom] = false;
    }
  };
  for (int s = 0; s < num_atoms(); ++s) {
    path.assign(1, s);
    on_path[s] = true;
    extend(extend, s);
    on_path[s] = false;
  }
  if (cycles.empty())
    return;

  auto ring_bond = [&](const std::vector<int> &cyc, int i) {
    const int n = static_cast<int>(cyc.size());
    return *find_bond(cyc[i % n], cyc[(i + 1) % n]);
  };
  auto has_multiple_bond = [&](int atom) {
    return std::any_of(adjacency_[atom].begin(), adjacency_[atom].end(),
                       [&](const Neighbor &nb) {
                         BondOrder o = bonds_[nb.bond].order;
                         return o == BondOrder::kDouble
                                || o == BondOrder::kTriple;
                       });
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const std::vector<int> &cyc: cycles) {
      const int n = static_cast<int>(cyc.size());
      bool all_aromatic = true;
      for (int i = 0; i < n; ++i)
        all_aromatic &= bonds_[ring_bond(cyc, i)].order == BondOrder::kAromatic;
      if (all_aromatic)
        continue;
      if (!std::all_of(cyc.begin(), cyc.end(), [&](int a) {
            return is_aromatic_ring_element(atoms_[a]);
          }))
        continue;

      bool match = false;
      if (n == 6) {
        for (int phase = 0; phase < 2 && !match; ++phase) {
          match = true;
          for (int i = 0; i < 6 && match; ++i) {
            BondOrder want =
                (i + phase) % 2 == 0 ? BondOrder::kDouble : BondOrder::kSingle;
            match = order_fits(bonds_[ring_bond(cyc, i)].order, want);
          }
        }
      } else {
        // X-a=b-c=d-X with X a lone-pair donor.
        static constexpr std::array<BondOrder, 5> kPattern = {
          BondOrder::kSingle, BondOrder::kDouble, BondOrder::kSingle,
          BondOrder::kDouble, BondOrder::kSingle,
        };
        for (int k = 0; k < 5 && !match; ++k) {
          const int x = cyc[k];
          if (atoms_[x].element == 6 || has_multiple_bond(x))
            continue;
          match = true;
          for (int i = 0; i < 5 && match; ++i) {
            match = order_fits(bonds_[ring_bond(cyc, k + i)].order,
                               kPattern[i]);
            const int a = cyc[(k + i) % 5];
            if (a != x && atoms_[a].element != 6 && atoms_[a].element != 7)
              match = false;
          }
        }
      }
      if (!match)
        continue;

      for (int i = 0; i < n; ++i) {
        atoms_[cyc[i]].aromatic = true;
        bonds_[ring_bond(cyc, i)].order = BondOrder::kAromatic;
      }
      changed = true;
    }
  }
}

void MolGraph::compute_ring_membership() {
  const int n = num_atoms();
  ring_atom_.assign(n, false);
  ring_bond_.assign(num_bonds(), true);

  // Bridges are exactly the non-ring bonds.
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  auto dfs = [&](auto &&self, int u, int parent_bond) -> void {
    disc[u] = low[u] = timer++;
    for (const Neighbor &nb: adjacency_[u]) {
      if (nb.bond == parent_bond)
        continue;
      if (disc[nb.atom] >= 0) {
        low[u] = std::min(low[u], disc[nb.atom]);
        continue;
      }
      self(self, nb.atom, nb.bond);
      low[u] = std::min(low[u], low[nb.atom]);
      if (low[nb.atom] > disc[u])
        ring_bond_[nb.bond] = false;
    }
  };
  for (int i = 0; i < n; ++i) {
    if (disc[i] < 0)
      dfs(dfs, i, -1);
  }
  for (int b = 0; b < num_bonds(); ++b) {
    if (ring_bond_[b]) {
      ring_atom_[bonds_[b].begin] = true;
      ring_atom_[bonds_[b].end] = true;
    }
  }
}

void MolGraph::normalize_stereo() {
  for (int i = 0; i < num_atoms(); ++i) {
    Atom &a = atoms_[i];
    if (a.chirality == Chirality::kNone)
      continue;
    const int h = hydrogens_[i];
    const int slots = degree(i) + h;
    const bool valid = h <= 1 && (slots == 4 || (slots == 3 && h == 0));
    if (!valid)
      a.chirality = Chirality::kNone;
  }

  std::vector<DoubleBondStereo> kept;
  for (DoubleBondStereo s: stereo_) {
    const Bond &b = bonds_[s.bond];
    if (b.order != BondOrder::kDouble)
      continue;
    if (std::any_of(kept.begin(), kept.end(),
                    [&](const DoubleBondStereo &k) { return k.bond == s.bond; }))
      continue;
    if (!find_bond(s.ref_begin, b.begin) && find_bond(s.ref_begin, b.end)
        && find_bond(s.ref_end, b.begin))
      std::swap(s.ref_begin, s.ref_end);
    if (s.ref_begin == b.end || s.ref_end == b.begin
        || !find_bond(s.ref_begin, b.begin) || !find_bond(s.ref_end, b.end))
      continue;

    auto lowest_other = [&](int atom, int exclude) {
      int best = -1, count = 0;
      for (const Neighbor &nb: adjacency_[atom]) {
        if (nb.atom == exclude)
          continue;
        // Substituents must hang on single bonds (no allenes, no aromatics).
        if (bonds_[nb.bond].order != BondOrder::kSingle)
          return std::make_pair(-1, 0);
        ++count;
        if (best < 0)
          best = nb.atom;
      }
      return std::make_pair(best, count);
    };
    auto [low_begin, n_begin] = lowest_other(b.begin, b.end);
    auto [low_end, n_end] = lowest_other(b.end, b.begin);
    if (n_begin < 1 || n_begin > 2 || n_end < 1 || n_end > 2)
      continue;
    if (s.ref_begin != low_begin) {
      s.ref_begin = low_begin;
      s.trans = !s.trans;
    }
    if (s.ref_end != low_end) {
      s.ref_end = low_end;
      s.trans = !s.trans;
    }
    kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(),
            [](const DoubleBondStereo &x, const DoubleBondStereo &y) {
              return x.bond < y.bond;
            });
  stereo_ = std::move(kept);
}

std::optional<int> MolGraph::find_bond(int a, int b) const {
  for (const Neighbor &nb: adjacency_[a]) {
    if (nb.atom == b)
      return nb.bond;
  }
  return std::nullopt;
}

int MolGraph::heavy_atom_count() const {
  return static_cast<int>(std::count_if(
      atoms_.begin(), atoms_.end(), [](const Atom &a) { return a.element != 1; }));
}

std::vector<int> MolGraph::component_ids() const {
  std::vector<int> ids(num_atoms(), -1);
  int next = 0;
  for (int s = 0; s < num_atoms(); ++s) {
    if (ids[s] >= 0)
      continue;
    std::queue<int> q;
    q.push(s);
    ids[s] = next;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Neighbor &nb: adjacency_[u]) {
        if (ids[nb.atom] < 0) {
          ids[nb.atom] = next;
          q.push(nb.atom);
        }
      }
    }
    ++next;
  }
  return ids;
}

int MolGraph::num_components() const {
  std::vector<int> ids = component_ids();
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

bool MolGraph::has_stereo() const {
  return !stereo_.empty()
         || std::any_of(atoms_.begin(), atoms_.end(), [](const Atom &a) {
              return a.chirality != Chirality::kNone;
            });
}

bool operator==(const MolGraph &a, const MolGraph &b) {
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds())
    return false;
  for (int i = 0; i < a.num_atoms(); ++i) {
    const Atom &x = a.atoms_[i];
    const Atom &y = b.atoms_[i];
    if (x.element != y.element || x.isotope != y.isotope
        || x.charge != y.charge || x.aromatic != y.aromatic
        || x.chirality != y.chirality || x.atom_class != y.atom_class
        || a.hydrogens_[i] != b.hydrogens_[i])
      return false;
  }
  for (int i = 0; i < a.num_bonds(); ++i) {
    const Bond &x = a.bonds_[i];
    const Bond &y = b.bonds_[i];
    if (x.begin != y.begin || x.end != y.end || x.order != y.order)
      return false;
  }
  return a.stereo_ == b.stereo_;
}

MolGraph disjoint_union(const MolGraph &a, const MolGraph &b) {
  std::vector<Atom> atoms = frozen_atoms(a);
  std::vector<Atom> tail = frozen_atoms(b);
  atoms.insert(atoms.end(), tail.begin(), tail.end());

  const int offset = a.num_atoms();
  std::vector<Bond> bonds = a.bonds();
  for (Bond bd: b.bonds()) {
    bd.begin += offset;
    bd.end += offset;
    bonds.push_back(bd);
  }
  std::vector<DoubleBondStereo> stereo = a.double_bond_stereo();
  for (DoubleBondStereo s: b.double_bond_stereo()) {
    s.bond += a.num_bonds();
    s.ref_begin += offset;
    s.ref_end += offset;
    stereo.push_back(s);
  }
  return MolGraph(std::move(atoms), std::move(bonds), std::move(stereo));
}

MolGraph permute_atoms(const MolGraph &mol, std::span<const int> new_index) {
  const int n = mol.num_atoms();
  std::vector<Atom> src = frozen_atoms(mol);
  std::vector<Atom> atoms(n);
  for (int i = 0; i < n; ++i) {
    Atom a = src[i];
    if (a.chirality != Chirality::kNone) {
      std::vector<int> old_order = intrinsic_order(mol, i, new_index);
      std::vector<int> new_order = old_order;
      std::sort(new_order.begin(), new_order.end());
      if (permutation_parity(old_order, new_order) == 1) {
        a.chirality = a.chirality == Chirality::kClockwise
                          ? Chirality::kCounterClockwise
                          : Chirality::kClockwise;
      }
    }
    atoms[new_index[i]] = a;
  }

  std::vector<Bond> bonds = mol.bonds();
  for (Bond &b: bonds) {
    b.begin = new_index[b.begin];
    b.end = new_index[b.end];
  }
  std::vector<DoubleBondStereo> stereo = mol.double_bond_stereo();
  for (DoubleBondStereo &s: stereo) {
    s.ref_begin = new_index[s.ref_begin];
    s.ref_end = new_index[s.ref_end];
  }
  return MolGraph(std::move(atoms), std::move(bonds), std::move(stereo));
}

}  // namespace chemreason
