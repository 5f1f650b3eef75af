#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chemreason::testing {
namespace {

void assign(const MolGraph &target, const Pattern &query, std::size_t q,
            std::vector<int> &map, std::vector<std::vector<int>> &out) {
  if (q == map.size()) {
    for (const QueryBond &qb: query.bonds()) {
      auto tb = target.find_bond(map[qb.begin], map[qb.end]);
      if (!tb || !qb.matches(target.bond(*tb).order))
        return;
    }
    out.push_back(map);
    return;
  }
  for (int t = 0; t < target.num_atoms(); ++t) {
    if (std::find(map.begin(), map.begin() + q, t) != map.begin() + q)
      continue;
    if (!query.atoms()[q].matches(target, t))
      continue;
    map[q] = t;
    assign(target, query, q + 1, map, out);
  }
}

}  // namespace

std::vector<std::vector<int>> brute_force_matches(const MolGraph &target,
                                                  const Pattern &query) {
  std::vector<int> map(query.num_atoms(), -1);
  std::vector<std::vector<int>> all;
  assign(target, query, 0, map, all);
  std::map<std::vector<int>, std::vector<int>> by_set;
  for (const auto &m: all) {
    std::vector<int> key = m;
    std::sort(key.begin(), key.end());
    auto it = by_set.find(key);
    if (it == by_set.end() || m < it->second)
      by_set[key] = m;
  }
  std::vector<std::vector<int>> out;
  for (auto &[key, m]: by_set)
    out.push_back(m);
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::int64_t, std::int64_t> naive_tanimoto_fraction(
    const std::vector<bool> &a, const std::vector<bool> &b) {
  std::int64_t na = 0, nb = 0, c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i])
      ++na;
    if (b[i])
      ++nb;
    if (a[i] && b[i])
      ++c;
  }
  return { c, na + nb - c };
}

double scalar_group_objective(const std::vector<double> &rewards,
                              const std::vector<std::vector<double>> &ratios,
                              double eps_low, double eps_high) {
  const double g = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r: rewards)
    mean += r / g;
  double var = 0.0;
  for (double r: rewards)
    var += (r - mean) * (r - mean) / g;
  const double sd = std::sqrt(var);

  double numerator = 0.0;
  double tokens = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double adv = (rewards[i] - mean) / sd;
    for (double r: ratios[i]) {
      double clipped = r;
      if (clipped < 1.0 - eps_low)
        clipped = 1.0 - eps_low;
      if (clipped > 1.0 + eps_high)
        clipped = 1.0 + eps_high;
      const double unclipped_term = r * adv;
      const double clipped_term = clipped * adv;
      numerator += unclipped_term < clipped_term ? unclipped_term
                                                 : clipped_term;
      tokens += 1.0;
    }
  }
  return numerator / tokens;
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string &path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty())
      out.push_back(line);
  }
  return out;
}

std::string test_data_path(const std::string &relative) {
  return std::string(CHEMREASON_TEST_DATA) + "/" + relative;
}

}  // namespace chemreason::testing
