#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/rlcore.h"

namespace chemreason {

std::optional<std::vector<double>> group_advantages(
    std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall,
                fmt::format("group of {} rollouts", rewards.size()));
  }
  // All-equal is tested directly: a computed std of 1e-17 is still a dead group.
  if (std::all_of(rewards.begin(), rewards.end(),
                  [&](double r) { return r == rewards[0]; }))
    return std::nullopt;
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r: rewards)
    var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0))
    return std::nullopt;
  std::vector<double> adv;
  adv.reserve(rewards.size());
  for (double r: rewards)
    adv.push_back((r - mean) / sd);
  return adv;
}

double clip_ratio(double ratio, double eps_low, double eps_high) {
  return std::clamp(ratio, 1.0 - eps_low, 1.0 + eps_high);
}

double clipped_term(double ratio, double advantage, double eps_low,
                    double eps_high) {
  return std::min(ratio * advantage,
                  clip_ratio(ratio, eps_low, eps_high) * advantage);
}

void DapoGroup::validate() const {
  if (rewards.size() < 2)
    throw Error(ErrorCode::kGroupTooSmall,
                fmt::format("group of {} rollouts", rewards.size()));
  if (ratios.size() != rewards.size() || lengths.size() != rewards.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("{} rewards, {} ratio lists, {} lengths",
                            rewards.size(), ratios.size(), lengths.size()));
  }
  if (!(eps_low >= 0.0) || !(eps_high >= 0.0))
    throw Error(ErrorCode::kShapeMismatch, "clip widths must be non-negative");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (lengths[i] <= 0 || static_cast<std::size_t>(lengths[i]) != ratios[i].size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("rollout {}: length {} with {} ratios", i,
                              lengths[i], ratios[i].size()));
    }
    for (double r: ratios[i]) {
      if (!(r > 0.0) || !std::isfinite(r))
        throw Error(ErrorCode::kShapeMismatch,
                    fmt::format("rollout {}: ratio {} not positive", i, r));
    }
  }
}

std::optional<double> dapo_objective(const DapoGroup &group) {
  group.validate();
  auto adv = group_advantages(group.rewards);
  if (!adv)
    return std::nullopt;
  double sum = 0.0;
  long long tokens = 0;
  for (std::size_t i = 0; i < group.ratios.size(); ++i) {
    for (double r: group.ratios[i])
      sum += clipped_term(r, (*adv)[i], group.eps_low, group.eps_high);
    tokens += group.lengths[i];
  }
  return sum / static_cast<double>(tokens);
}

bool difficulty_retain(const std::vector<bool> &correctness) {
  if (correctness.empty())
    throw Error(ErrorCode::kGroupTooSmall, "empty rollout panel");
  const auto hits = std::count(correctness.begin(), correctness.end(), true);
  return hits > 0 && hits < static_cast<long>(correctness.size());
}

}  // namespace chemreason
