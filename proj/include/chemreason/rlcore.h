#ifndef CHEMREASON_RLCORE_H_
#define CHEMREASON_RLCORE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemreason/extraction.h"
#include "chemreason/fingerprint.h"

namespace chemreason {

inline constexpr double kDefaultEpsLow = 0.2;
inline constexpr double kDefaultEpsHigh = 0.28;
inline constexpr int kDifficultyRollouts = 4;
inline constexpr int kRlGroupSize = 8;

enum class AccuracyVariant { kStructId, kDenseTanimoto, kExactString };

std::string_view accuracy_variant_name(AccuracyVariant v);
// Throws Error(kInvalidSpec) on unknown names.
AccuracyVariant parse_accuracy_variant(std::string_view name);

struct RewardSpec {
  AccuracyVariant variant = AccuracyVariant::kStructId;
  double w_accuracy = 0.9;
  double w_format = 0.1;
  FingerprintParams fingerprint;
  // struct_id also requires equal heavy-atom counts. Off gives the plain
  // "Tanimoto is exactly 1" rule.
  bool heavy_atom_guard = true;

  // Throws Error(kInvalidSpec): negative weights, weights not summing to 1
  // within 1e-12, or bad fingerprint parameters.
  void validate() const;
};

struct AccuracyResult {
  double score = 0.0;
  double similarity = 0.0;
  ExtractedAnswer answer;
};

// Extracts a SMILES (or reaction SMILES) answer and scores it against the
// ground truth under spec.variant. A missing or unparseable answer scores 0.
// Throws Error(kInvalidGroundTruth) if the ground truth does not parse.
AccuracyResult accuracy_reward_smiles(std::string_view prediction,
                                      std::string_view ground_truth,
                                      const RewardSpec &spec = {});

// Trim, collapse internal whitespace runs to one space, ASCII lower-case.
std::string normalize_iupac(std::string_view name);

// 1 iff the extracted name equals the ground truth after normalization.
AccuracyResult accuracy_reward_iupac(std::string_view prediction,
                                     std::string_view ground_truth);

// 1 iff the output is a well-formed think/answer trace.
int format_reward(std::string_view text);

struct RewardOutcome {
  double accuracy = 0.0;
  int format = 0;
  double composite = 0.0;
  double similarity = 0.0;
  AnswerSource source = AnswerSource::kNone;
};

double combine_reward(double accuracy, int format, const RewardSpec &spec);

// `target` selects SMILES or IUPAC scoring of the accuracy component.
RewardOutcome composite_reward(std::string_view prediction,
                               std::string_view ground_truth,
                               const RewardSpec &spec = {},
                               AnswerKind target = AnswerKind::kSmiles);

// (R_i - mean) / population std. nullopt when all rewards are equal (the
// group carries no signal and is dropped). Throws Error(kGroupTooSmall) for
// fewer than two rewards.
std::optional<std::vector<double>> group_advantages(
    std::span<const double> rewards);

double clip_ratio(double ratio, double eps_low, double eps_high);

// min(r * A, clip(r, 1 - eps_low, 1 + eps_high) * A)
double clipped_term(double ratio, double advantage, double eps_low,
                    double eps_high);

struct DapoGroup {
  std::vector<double> rewards;
  std::vector<std::vector<double>> ratios;  // per rollout, one per token
  std::vector<int> lengths;
  double eps_low = kDefaultEpsLow;
  double eps_high = kDefaultEpsHigh;

  // Throws Error(kShapeMismatch) on length disagreement, non-positive or
  // non-finite ratios, empty rollouts, or negative clip widths;
  // Error(kGroupTooSmall) below two rollouts.
  void validate() const;
};

// Token-level clipped surrogate: sum over rollouts and tokens of
// clipped_term divided by the total token count. nullopt for zero-variance
// groups.
std::optional<double> dapo_objective(const DapoGroup &group);

// Keep a question only if its rollouts disagree. Throws Error(kGroupTooSmall)
// on an empty panel.
bool difficulty_retain(const std::vector<bool> &correctness);

}  // namespace chemreason

#endif  // CHEMREASON_RLCORE_H_
