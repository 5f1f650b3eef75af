#include "chemreason/similarity.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "chemreason/canonical.h"
#include "chemreason/error.h"

namespace chemreason {
namespace {

struct Component {
  std::string canonical;
  Fingerprint fp;
  int heavy = 0;
};

std::vector<Component> components(const std::vector<MolGraph> &mols,
                                  const FingerprintParams &params) {
  std::vector<Component> out;
  out.reserve(mols.size());
  for (const MolGraph &m: mols) {
    out.push_back({ canonical_smiles(m), morgan_fingerprint(m, params),
                    m.heavy_atom_count() });
  }
  std::sort(out.begin(), out.end(), [](const Component &x, const Component &y) {
    return x.canonical < y.canonical;
  });
  return out;
}

struct RoleResult {
  double matched = 0.0;
  int slots = 0;
  bool equal = false;
  int heavy_pred = 0;
  int heavy_gt = 0;
};

RoleResult compare_role(const std::vector<MolGraph> &pred,
                        const std::vector<MolGraph> &gt,
                        const FingerprintParams &params) {
  RoleResult r;
  std::vector<Component> p = components(pred, params);
  std::vector<Component> g = components(gt, params);
  r.slots = static_cast<int>(std::max(p.size(), g.size()));
  r.equal = p.size() == g.size()
            && std::equal(p.begin(), p.end(), g.begin(),
                          [](const Component &x, const Component &y) {
                            return x.canonical == y.canonical;
                          });
  for (const Component &c: p)
    r.heavy_pred += c.heavy;
  for (const Component &c: g)
    r.heavy_gt += c.heavy;

  std::vector<std::tuple<double, int, int>> pairs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j)
      pairs.emplace_back(tanimoto(p[i].fp, g[j].fp), i, j);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto &x,
                                                   const auto &y) {
    return std::get<0>(x) > std::get<0>(y);
  });
  std::vector<bool> used_p(p.size(), false), used_g(g.size(), false);
  for (auto [sim, i, j]: pairs) {
    if (used_p[i] || used_g[j])
      continue;
    used_p[i] = used_g[j] = true;
    r.matched += sim;
  }
  return r;
}

}  // namespace

StructureScore compare_molecules(const MolGraph &pred, const MolGraph &gt,
                                 const FingerprintParams &params) {
  TanimotoCounts t = tanimoto_counts(morgan_fingerprint(pred, params),
                                     morgan_fingerprint(gt, params));
  return { t.value(), t.exact(),
           pred.heavy_atom_count() == gt.heavy_atom_count() };
}

StructureScore compare_reactions(const ReactionGraph &pred,
                                 const ReactionGraph &gt,
                                 const FingerprintParams &params) {
  params.validate();
  const RoleResult roles[] = {
    compare_role(pred.reactants, gt.reactants, params),
    compare_role(pred.agents, gt.agents, params),
    compare_role(pred.products, gt.products, params),
  };
  double matched = 0.0;
  int slots = 0;
  StructureScore s;
  s.exact = true;
  s.heavy_atoms_match = true;
  for (const RoleResult &r: roles) {
    matched += r.matched;
    slots += r.slots;
    s.exact = s.exact && r.equal;
    s.heavy_atoms_match = s.heavy_atoms_match && r.heavy_pred == r.heavy_gt;
  }
  s.similarity = slots == 0 ? 1.0 : matched / slots;
  if (s.exact)
    s.similarity = 1.0;
  else if (s.similarity >= 1.0)
    s.similarity = std::nextafter(1.0, 0.0);
  return s;
}

std::optional<StructureScore> compare_structures(
    std::string_view pred, std::string_view gt,
    const FingerprintParams &params) {
  if (looks_like_reaction(gt)) {
    ReactionGraph g = parse_reaction(gt);
    ReactionGraph p;
    try {
      p = parse_reaction(pred);
    } catch (const ParseError &) {
      return std::nullopt;
    }
    return compare_reactions(p, g, params);
  }
  MolGraph g = parse_smiles(gt);
  MolGraph p;
  try {
    p = parse_smiles(pred);
  } catch (const ParseError &) {
    return std::nullopt;
  }
  return compare_molecules(p, g, params);
}

}  // namespace chemreason
