#include <cctype>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/rlcore.h"
#include "chemreason/similarity.h"
#include "chemreason/smiles.h"

namespace chemreason {
namespace {

// Fails loudly on a corrupt dataset row before the prediction is considered.
void check_ground_truth(std::string_view gt) {
  try {
    if (looks_like_reaction(gt))
      parse_reaction(gt);
    else
      parse_smiles(gt);
  } catch (const ParseError &e) {
    throw Error(ErrorCode::kInvalidGroundTruth,
                fmt::format("ground truth '{}' does not parse: {}", gt, e.what()));
  }
}

}  // namespace

std::string_view accuracy_variant_name(AccuracyVariant v) {
  switch (v) {
  case AccuracyVariant::kStructId: return "struct_id";
  case AccuracyVariant::kDenseTanimoto: return "dense_tanimoto";
  case AccuracyVariant::kExactString: return "exact_string";
  }
  return "unknown";
}

AccuracyVariant parse_accuracy_variant(std::string_view name) {
  for (AccuracyVariant v: { AccuracyVariant::kStructId,
                            AccuracyVariant::kDenseTanimoto,
                            AccuracyVariant::kExactString }) {
    if (accuracy_variant_name(v) == name)
      return v;
  }
  throw Error(ErrorCode::kInvalidSpec,
              fmt::format("unknown accuracy variant '{}'", name));
}

void RewardSpec::validate() const {
  if (!(w_accuracy >= 0.0) || !(w_format >= 0.0))
    throw Error(ErrorCode::kInvalidSpec, "reward weights must be non-negative");
  if (std::abs(w_accuracy + w_format - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("reward weights sum to {}, not 1",
                            w_accuracy + w_format));
  }
  try {
    fingerprint.validate();
  } catch (const Error &e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
}

AccuracyResult accuracy_reward_smiles(std::string_view prediction,
                                      std::string_view ground_truth,
                                      const RewardSpec &spec) {
  check_ground_truth(ground_truth);
  AccuracyResult r;
  r.answer = extract_answer(prediction, AnswerKind::kSmiles);
  if (!r.answer.found())
    return r;
  auto s = compare_structures(r.answer.value, ground_truth, spec.fingerprint);
  if (!s)
    return r;
  r.similarity = s->similarity;
  switch (spec.variant) {
  case AccuracyVariant::kStructId:
    r.score = s->exact && (!spec.heavy_atom_guard || s->heavy_atoms_match)
                  ? 1.0 : 0.0;
    break;
  case AccuracyVariant::kDenseTanimoto:
    r.score = s->similarity;
    break;
  case AccuracyVariant::kExactString:
    r.score = r.answer.value == ground_truth ? 1.0 : 0.0;
    break;
  }
  return r;
}

std::string normalize_iupac(std::string_view name) {
  std::string out;
  bool space = false;
  for (char c: name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space)
      out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

AccuracyResult accuracy_reward_iupac(std::string_view prediction,
                                     std::string_view ground_truth) {
  AccuracyResult r;
  r.answer = extract_answer(prediction, AnswerKind::kIupac);
  if (r.answer.found()
      && normalize_iupac(r.answer.value) == normalize_iupac(ground_truth)) {
    r.score = 1.0;
    r.similarity = 1.0;
  }
  return r;
}

int format_reward(std::string_view text) {
  return validate_trace(text).well_formed ? 1 : 0;
}

double combine_reward(double accuracy, int format, const RewardSpec &spec) {
  return spec.w_accuracy * accuracy + spec.w_format * format;
}

RewardOutcome composite_reward(std::string_view prediction,
                               std::string_view ground_truth,
                               const RewardSpec &spec, AnswerKind target) {
  spec.validate();
  AccuracyResult acc = target == AnswerKind::kIupac
                           ? accuracy_reward_iupac(prediction, ground_truth)
                           : accuracy_reward_smiles(prediction, ground_truth, spec);
  RewardOutcome out;
  out.accuracy = acc.score;
  out.format = format_reward(prediction);
  out.composite = combine_reward(out.accuracy, out.format, spec);
  out.similarity = acc.similarity;
  out.source = acc.answer.source;
  return out;
}

}  // namespace chemreason
