#include "chemreason/canonical.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "chemreason/smiles.h"

namespace chemreason {
namespace {

// Leaves explored by the stereo-aware search before settling for the best
// string found so far.
constexpr int kMaxSearchLeaves = 4096;

int bond_code(BondOrder order) {
  return static_cast<int>(order);
}

// Dense ranks from arbitrary comparable keys: equal keys share a rank.
template <class Key>
std::vector<int> dense_ranks(const std::vector<Key> &keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> ranks(n, 0);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[idx[i - 1]] < keys[idx[i]])
      ++r;
    ranks[idx[i]] = r;
  }
  return ranks;
}

int count_classes(const std::vector<int> &ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

std::vector<int> initial_ranks(const MolGraph &mol) {
  using Invariant = std::tuple<int, int, int, int, int, int, int, int>;
  std::vector<Invariant> keys;
  keys.reserve(mol.num_atoms());
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    // Degree leads so that output starts from a chain end where possible.
    keys.emplace_back(mol.degree(i), a.element, a.charge, a.isotope,
                      mol.total_h(i), a.aromatic ? 1 : 0,
                      mol.in_ring(i) ? 1 : 0, a.atom_class.value_or(-1));
  }
  return dense_ranks(keys);
}

void refine(const MolGraph &mol, std::vector<int> &ranks) {
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  int classes = count_classes(ranks);
  while (true) {
    std::vector<Key> keys(mol.num_atoms());
    for (int i = 0; i < mol.num_atoms(); ++i) {
      keys[i].first = ranks[i];
      for (const Neighbor &nb: mol.neighbors(i)) {
        keys[i].second.emplace_back(ranks[nb.atom],
                                    bond_code(mol.bond(nb.bond).order));
      }
      std::sort(keys[i].second.begin(), keys[i].second.end());
    }
    ranks = dense_ranks(keys);
    const int refined = count_classes(ranks);
    if (refined == classes)
      return;
    classes = refined;
  }
}

// Members of the lowest-ranked class with more than one atom, ascending index.
std::vector<int> lowest_tied_class(const std::vector<int> &ranks) {
  const int n = static_cast<int>(ranks.size());
  std::vector<int> counts(n, 0);
  for (int r: ranks)
    ++counts[r];
  for (int r = 0; r < n; ++r) {
    if (counts[r] < 2)
      continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (ranks[i] == r)
        members.push_back(i);
    }
    return members;
  }
  return {};
}

std::vector<int> individualize(const std::vector<int> &ranks, int atom) {
  std::vector<std::pair<int, int>> keys(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i)
    keys[i] = { ranks[i], static_cast<int>(i) == atom ? 0 : 1 };
  return dense_ranks(keys);
}

struct SearchState {
  const MolGraph &mol;
  bool exhaustive;
  int leaves = 0;
  bool found = false;
  std::string best;
  std::vector<int> best_ranks;
};

void search(SearchState &st, std::vector<int> ranks) {
  refine(st.mol, ranks);
  std::vector<int> tied = lowest_tied_class(ranks);
  if (tied.empty()) {
    ++st.leaves;
    std::string s = write_smiles_ranked(st.mol, ranks);
    if (!st.found || s < st.best) {
      st.found = true;
      st.best = std::move(s);
      st.best_ranks = ranks;
    }
    return;
  }
  if (!st.exhaustive)
    tied.resize(1);
  for (int atom: tied) {
    if (st.found && st.leaves >= kMaxSearchLeaves)
      return;
    search(st, individualize(ranks, atom));
  }
}

SearchState run_search(const MolGraph &mol) {
  SearchState st { mol, mol.has_stereo(), 0, false, {}, {} };
  if (mol.empty()) {
    st.found = true;
    return st;
  }
  search(st, initial_ranks(mol));
  return st;
}

}  // namespace

std::vector<int> canonical_ranks(const MolGraph &mol) {
  return run_search(mol).best_ranks;
}

std::string canonical_smiles(const MolGraph &mol) {
  return run_search(mol).best;
}

MolGraph canonicalize(const MolGraph &mol) {
  SearchState st = run_search(mol);
  std::vector<int> order;
  write_smiles_ranked(mol, st.best_ranks, &order);
  std::vector<int> new_index(mol.num_atoms());
  for (int pos = 0; pos < static_cast<int>(order.size()); ++pos)
    new_index[order[pos]] = pos;
  return permute_atoms(mol, new_index);
}

bool molecules_equal(const MolGraph &a, const MolGraph &b) {
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds())
    return false;
  return canonicalize(a) == canonicalize(b);
}

std::string write_smiles(const MolGraph &mol, WriteMode mode) {
  if (!mode.random)
    return canonical_smiles(mol);
  std::vector<int> ranks(mol.num_atoms());
  std::iota(ranks.begin(), ranks.end(), 0);
  std::mt19937_64 rng(mode.seed);
  std::shuffle(ranks.begin(), ranks.end(), rng);
  return write_smiles_ranked(mol, ranks);
}

}  // namespace chemreason
