#include <algorithm>
#include <set>
#include <vector>

#include "chemreason/funcgroups.h"

namespace chemreason {
namespace {

// Backtracking in a fixed query order where every atom after the first is
// adjacent to an earlier one, so candidates come from a mapped neighbor.
class Matcher {
public:
  Matcher(const MolGraph &target, const Pattern &query, bool first_only)
      : target_(target), query_(query), first_only_(first_only),
        qadj_(query.num_atoms()), map_(query.num_atoms(), -1),
        used_(target.num_atoms(), false) {
    for (int i = 0; i < static_cast<int>(query.bonds().size()); ++i) {
      const QueryBond &b = query.bonds()[i];
      qadj_[b.begin].push_back(i);
      qadj_[b.end].push_back(i);
    }
    plan_order();
  }

  std::vector<std::vector<int>> run() {
    if (query_.num_atoms() == 0 || query_.num_atoms() > target_.num_atoms())
      return {};
    extend(0);
    return std::move(found_);
  }

private:
  void plan_order() {
    const int n = query_.num_atoms();
    std::vector<bool> seen(n, false);
    anchor_.assign(n, -1);
    if (n == 0)
      return;
    order_.push_back(0);
    seen[0] = true;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const int u = order_[k];
      for (int bi: qadj_[u]) {
        const QueryBond &b = query_.bonds()[bi];
        const int v = b.begin == u ? b.end : b.begin;
        if (!seen[v]) {
          seen[v] = true;
          anchor_[v] = u;
          order_.push_back(v);
        }
      }
    }
  }

  bool compatible(int q, int t) const {
    if (used_[t] || !query_.atoms()[q].matches(target_, t))
      return false;
    if (target_.degree(t) < static_cast<int>(qadj_[q].size()))
      return false;
    for (int bi: qadj_[q]) {
      const QueryBond &b = query_.bonds()[bi];
      const int other = b.begin == q ? b.end : b.begin;
      if (map_[other] < 0)
        continue;
      auto tb = target_.find_bond(t, map_[other]);
      if (!tb || !b.matches(target_.bond(*tb).order))
        return false;
    }
    return true;
  }

  void extend(std::size_t depth) {
    if (first_only_ && !found_.empty())
      return;
    if (depth == order_.size()) {
      found_.push_back(map_);
      return;
    }
    const int q = order_[depth];
    auto attempt = [&](int t) {
      if (!compatible(q, t))
        return;
      map_[q] = t;
      used_[t] = true;
      extend(depth + 1);
      used_[t] = false;
      map_[q] = -1;
    };
    if (anchor_[q] < 0) {
      for (int t = 0; t < target_.num_atoms(); ++t)
        attempt(t);
    } else {
      for (const Neighbor &nb: target_.neighbors(map_[anchor_[q]]))
        attempt(nb.atom);
    }
  }

  const MolGraph &target_;
  const Pattern &query_;
  bool first_only_;
  std::vector<std::vector<int>> qadj_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::vector<std::vector<int>> found_;
};

}  // namespace

std::vector<std::vector<int>> match_substructure(const MolGraph &target,
                                                 const Pattern &query) {
  std::vector<std::vector<int>> all = Matcher(target, query, false).run();
  std::sort(all.begin(), all.end());
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  for (std::vector<int> &m: all) {
    std::vector<int> key = m;
    std::sort(key.begin(), key.end());
    if (seen.insert(std::move(key)).second)
      out.push_back(std::move(m));
  }
  return out;
}

bool has_substructure(const MolGraph &target, const Pattern &query) {
  return !Matcher(target, query, true).run().empty();
}

}  // namespace chemreason
