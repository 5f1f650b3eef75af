#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "chemreason/element.h"
#include "chemreason/molgraph.h"
#include "chemreason/smiles.h"

namespace chemreason {
namespace {

constexpr int kHydrogenSlot = -1;

struct RingClosure {
  int bond;
  int opener;
  int closer;
};

// Traversal decided before any text is produced: the spanning forest, where
// ring bonds open and close, and which way every bond is written.
struct Plan {
  std::vector<int> order;  // atoms in output order
  std::vector<int> position;
  std::vector<int> parent;
  std::vector<int> parent_bond;
  std::vector<std::vector<int>> children;
  std::vector<RingClosure> closures;
  std::vector<std::vector<int>> ring_events;  // closure ids, written order
  std::vector<int> written_first;             // per bond
  std::vector<bool> is_closure;               // per bond
  std::vector<int> roots;
};

int bond_weight(BondOrder order) {
  switch (order) {
  case BondOrder::kDouble:
    return 2;
  case BondOrder::kTriple:
    return 3;
  default:
    return 1;
  }
}

Plan make_plan(const MolGraph &mol, std::span<const int> ranks) {
  const int n = mol.num_atoms();
  Plan plan;
  plan.position.assign(n, -1);
  plan.parent.assign(n, -1);
  plan.parent_bond.assign(n, -1);
  plan.children.assign(n, {});
  plan.ring_events.assign(n, {});
  plan.written_first.assign(mol.num_bonds(), -1);
  plan.is_closure.assign(mol.num_bonds(), false);

  std::vector<bool> bond_seen(mol.num_bonds(), false);
  std::vector<std::vector<int>> openings(n);

  auto ranked_neighbors = [&](int u) {
    std::vector<Neighbor> nbs(mol.neighbors(u).begin(), mol.neighbors(u).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor &a, const Neighbor &b) {
      return ranks[a.atom] < ranks[b.atom];
    });
    return nbs;
  };

  auto dfs = [&](auto &&self, int u) -> void {
    plan.position[u] = static_cast<int>(plan.order.size());
    plan.order.push_back(u);
    for (const Neighbor &nb: ranked_neighbors(u)) {
      if (bond_seen[nb.bond])
        continue;
      if (plan.position[nb.atom] >= 0) {
        // Back edge to an ancestor: the ancestor opens, u closes.
        bond_seen[nb.bond] = true;
        const int id = static_cast<int>(plan.closures.size());
        plan.closures.push_back({ nb.bond, nb.atom, u });
        plan.is_closure[nb.bond] = true;
        plan.written_first[nb.bond] = nb.atom;
        plan.ring_events[u].push_back(id);
        openings[nb.atom].push_back(id);
        continue;
      }
      bond_seen[nb.bond] = true;
      plan.parent[nb.atom] = u;
      plan.parent_bond[nb.atom] = nb.bond;
      plan.written_first[nb.bond] = u;
      plan.children[u].push_back(nb.atom);
      self(self, nb.atom);
    }
  };

  std::vector<int> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(),
            [&](int a, int b) { return ranks[a] < ranks[b]; });
  for (int start: by_rank) {
    if (plan.position[start] >= 0)
      continue;
    plan.roots.push_back(start);
    dfs(dfs, start);
  }

  // Closings at an atom come first (in discovery order), then its openings
  // ordered by where their partner appears.
  for (int u = 0; u < n; ++u) {
    std::vector<int> &opens = openings[u];
    std::sort(opens.begin(), opens.end(), [&](int a, int b) {
      return plan.position[plan.closures[a].closer]
             < plan.position[plan.closures[b].closer];
    });
    plan.ring_events[u].insert(plan.ring_events[u].end(), opens.begin(),
                               opens.end());
  }
  return plan;
}

// Directional marks realizing the double-bond configurations. Each marked bond
// carries one binary variable: whether the atom written second sits "up"
// relative to the atom written first ('/'). Configurations impose parity
// constraints between pairs of variables.
class DirectionSolver {
public:
  DirectionSolver(const MolGraph &mol, const Plan &plan)
      : mol_(mol), plan_(plan), parent_(mol.num_bonds()),
        parity_(mol.num_bonds(), 0), marked_(mol.num_bonds(), false) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  void solve(const std::vector<int> &emission_sequence) {
    std::vector<bool> stereo_atom(mol_.num_atoms(), false);
    for (const DoubleBondStereo &s: mol_.double_bond_stereo()) {
      stereo_atom[mol_.bond(s.bond).begin] = true;
      stereo_atom[mol_.bond(s.bond).end] = true;
    }
    std::vector<bool> double_atom(mol_.num_atoms(), false);
    for (const Bond &b: mol_.bonds()) {
      if (b.order == BondOrder::kDouble) {
        double_atom[b.begin] = true;
        double_atom[b.end] = true;
      }
    }

    // Visit double bonds in output order so the choice of marked bonds does
    // not depend on the input numbering.
    std::vector<DoubleBondStereo> ordered = mol_.double_bond_stereo();
    auto out_key = [&](const DoubleBondStereo &s) {
      const Bond &b = mol_.bond(s.bond);
      const int p = plan_.position[b.begin];
      const int q = plan_.position[b.end];
      return std::pair(std::min(p, q), std::max(p, q));
    };
    std::sort(ordered.begin(), ordered.end(),
              [&](const DoubleBondStereo &x, const DoubleBondStereo &y) {
                return out_key(x) < out_key(y);
              });
    for (const DoubleBondStereo &s: ordered) {
      const Bond &db = mol_.bond(s.bond);
      auto left = choose(db.begin, db.end, stereo_atom, double_atom);
      auto right = choose(db.end, db.begin, stereo_atom, double_atom);
      if (!left || !right)
        continue;
      const int sub_left = mol_.other_atom(*left, db.begin);
      const int sub_right = mol_.other_atom(*right, db.end);
      bool want = s.trans;
      if (sub_left != s.ref_begin)
        want = !want;
      if (sub_right != s.ref_end)
        want = !want;
      const int rel = (want ? 1 : 0)
                      ^ (plan_.written_first[*left] != db.begin ? 1 : 0)
                      ^ (plan_.written_first[*right] != db.end ? 1 : 0);
      if (unite(*left, *right, rel)) {
        marked_[*left] = true;
        marked_[*right] = true;
      }
    }

    value_.assign(mol_.num_bonds(), -1);
    std::vector<int> root_value(mol_.num_bonds(), -1);
    for (int b: emission_sequence) {
      if (!marked_[b])
        continue;
      auto [root, par] = find(b);
      if (root_value[root] < 0)
        root_value[root] = par;  // makes this bond's own value 0 ('/')
      value_[b] = root_value[root] ^ par;
    }
  }

  // '/', '\\' or 0.
  char mark(int bond) const {
    if (value_.empty() || value_[bond] < 0)
      return 0;
    return value_[bond] == 0 ? '/' : '\\';
  }

private:
  std::optional<int> choose(int center, int other,
                            const std::vector<bool> &stereo_atom,
                            const std::vector<bool> &double_atom) const {
    std::optional<int> best;
    std::tuple<int, int, int, int> best_key;
    for (const Neighbor &nb: mol_.neighbors(center)) {
      if (nb.atom == other || mol_.bond(nb.bond).order != BondOrder::kSingle)
        continue;
      const bool conflicts = double_atom[nb.atom] && !stereo_atom[nb.atom];
      std::tuple<int, int, int, int> key {
        marked_[nb.bond] ? 0 : 1,
        conflicts ? 1 : 0,
        plan_.is_closure[nb.bond] ? 1 : 0,
        plan_.position[nb.atom],
      };
      if (!best || key < best_key) {
        best = nb.bond;
        best_key = key;
      }
    }
    return best;
  }

  std::pair<int, int> find(int b) {
    int par = 0;
    int root = b;
    while (parent_[root] != root) {
      par ^= parity_[root];
      root = parent_[root];
    }
    return { root, par };
  }

  bool unite(int a, int b, int rel) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb)
      return (pa ^ pb) == rel;
    parent_[rb] = ra;
    parity_[rb] = pa ^ pb ^ rel;
    return true;
  }

  const MolGraph &mol_;
  const Plan &plan_;
  std::vector<int> parent_;
  std::vector<int> parity_;
  std::vector<bool> marked_;
  std::vector<int> value_;
};

class Writer {
public:
  Writer(const MolGraph &mol, const Plan &plan, const DirectionSolver &dirs)
      : mol_(mol), plan_(plan), dirs_(dirs) { }

  std::string run() {
    digits_.assign(100, false);
    closure_digit_.assign(plan_.closures.size(), -1);
    for (std::size_t i = 0; i < plan_.roots.size(); ++i) {
      if (i > 0)
        out_ += '.';
      emit(plan_.roots[i]);
    }
    return std::move(out_);
  }

  // Order in which bond symbols are emitted; drives the direction solver.
  static std::vector<int> emission_sequence(const Plan &plan) {
    std::vector<int> seq;
    auto visit = [&](auto &&self, int u) -> void {
      if (plan.parent_bond[u] >= 0)
        seq.push_back(plan.parent_bond[u]);
      for (int id: plan.ring_events[u]) {
        if (plan.closures[id].opener == u)
          seq.push_back(plan.closures[id].bond);
      }
      for (int c: plan.children[u])
        self(self, c);
    };
    for (int r: plan.roots)
      visit(visit, r);
    return seq;
  }

private:
  void emit(int u) {
    if (plan_.parent_bond[u] >= 0)
      out_ += bond_symbol(plan_.parent_bond[u]);
    out_ += atom_token(u);

    for (int id: plan_.ring_events[u]) {
      const RingClosure &rc = plan_.closures[id];
      if (rc.closer == u) {
        const int d = closure_digit_[id];
        digits_[d] = false;
        append_digit(d);
      } else {
        int d = 1;
        while (d < 100 && digits_[d])
          ++d;
        digits_[d] = true;
        closure_digit_[id] = d;
        out_ += bond_symbol(rc.bond);
        append_digit(d);
      }
    }

    const std::vector<int> &kids = plan_.children[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch)
        out_ += '(';
      emit(kids[i]);
      if (branch)
        out_ += ')';
    }
  }

  void append_digit(int d) {
    if (d < 10)
      out_ += static_cast<char>('0' + d);
    else
      out_ += fmt::format("%{}", d);
  }

  std::string bond_symbol(int b) const {
    if (char m = dirs_.mark(b))
      return std::string(1, m);
    const Bond &bond = mol_.bond(b);
    const bool both_aromatic =
        mol_.atom(bond.begin).aromatic && mol_.atom(bond.end).aromatic;
    switch (bond.order) {
    case BondOrder::kSingle:
      return both_aromatic ? "-" : "";
    case BondOrder::kDouble:
      return "=";
    case BondOrder::kTriple:
      return "#";
    case BondOrder::kAromatic:
      return mol_.bond_in_ring(b) ? "" : ":";
    }
    return "";
  }

  std::vector<int> written_neighbor_order(int u) const {
    std::vector<int> order;
    if (plan_.parent[u] >= 0)
      order.push_back(plan_.parent[u]);
    const int h = mol_.total_h(u);
    if (h == 1 || mol_.degree(u) == 3)
      order.push_back(kHydrogenSlot);
    for (int id: plan_.ring_events[u]) {
      const RingClosure &rc = plan_.closures[id];
      order.push_back(rc.opener == u ? rc.closer : rc.opener);
    }
    for (int c: plan_.children[u])
      order.push_back(c);
    return order;
  }

  std::string atom_token(int u) const {
    const Atom &a = mol_.atom(u);
    std::string symbol(element_symbol(a.element));
    if (a.aromatic)
      symbol[0] = static_cast<char>(std::tolower(symbol[0]));

    std::string chiral;
    if (a.chirality != Chirality::kNone) {
      std::vector<int> written = written_neighbor_order(u);
      std::vector<int> intrinsic = written;
      std::sort(intrinsic.begin(), intrinsic.end());
      const bool ccw = (a.chirality == Chirality::kCounterClockwise)
                       != (permutation_parity(intrinsic, written) == 1);
      chiral = ccw ? "@" : "@@";
    }

    int bond_sum = 0;
    for (const Neighbor &nb: mol_.neighbors(u))
      bond_sum += bond_weight(mol_.bond(nb.bond).order);
    const int h = mol_.total_h(u);
    const bool bare =
        is_organic_subset(a.element) && a.isotope == 0 && a.charge == 0
        && !a.atom_class && chiral.empty()
        && organic_implicit_h(a.element, a.aromatic, bond_sum) == h;
    if (bare)
      return symbol;

    std::string tok = "[";
    if (a.isotope > 0)
      tok += std::to_string(a.isotope);
    tok += symbol;
    tok += chiral;
    if (h > 0) {
      tok += 'H';
      if (h > 1)
        tok += std::to_string(h);
    }
    if (a.charge != 0) {
      tok += a.charge > 0 ? '+' : '-';
      if (std::abs(a.charge) > 1)
        tok += std::to_string(std::abs(a.charge));
    }
    if (a.atom_class)
      tok += ":" + std::to_string(*a.atom_class);
    tok += ']';
    return tok;
  }

  const MolGraph &mol_;
  const Plan &plan_;
  const DirectionSolver &dirs_;
  std::string out_;
  std::vector<bool> digits_;
  std::vector<int> closure_digit_;
};

}  // namespace

std::string write_smiles_ranked(const MolGraph &mol, std::span<const int> ranks,
                                std::vector<int> *atom_order) {
  const Plan plan = make_plan(mol, ranks);
  DirectionSolver dirs(mol, plan);
  if (!mol.double_bond_stereo().empty())
    dirs.solve(Writer::emission_sequence(plan));
  if (atom_order != nullptr)
    *atom_order = plan.order;
  return Writer(mol, plan, dirs).run();
}

}  // namespace chemreason
