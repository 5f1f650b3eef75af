#ifndef CHEMREASON_PIPELINE_SAMPLE_H_
#define CHEMREASON_PIPELINE_SAMPLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreason/task.h"

namespace chemreason {

enum class VerdictState { kPending, kPass, kFail };

struct Verdict {
  VerdictState state = VerdictState::kPending;
  std::string reason;    // set on failure: which rule rejected the sample
  std::uint64_t seq = 0; // order in which verdicts were decided, 0 if pending

  bool pending() const { return state == VerdictState::kPending; }
  bool passed() const { return state == VerdictState::kPass; }

  static Verdict pass() { return { VerdictState::kPass, {}, 0 }; }
  static Verdict fail(std::string why) {
    return { VerdictState::kFail, std::move(why), 0 };
  }
};

struct Anchors {
  // One entry per anchor target (see anchor_targets), in the same order.
  std::vector<std::optional<std::string>> iupac_names;
  std::vector<std::vector<std::string>> functional_groups;
  std::optional<std::string> demo_id;
};

struct FilterVerdicts {
  Verdict structural;
  Verdict consistency;
  Verdict verifier;
};

struct Provenance {
  std::string model_id;
  std::string timestamp;
};

// Query/ground-truth conventions per task:
//   mol_recognition   query = molecule SMILES, ground_truth = same molecule
//   rxn_recognition   query = reaction SMILES, ground_truth = same reaction
//   rxn_prediction    query = "reactants>agents>", ground_truth = products
//   mol_to_iupac      query = molecule SMILES, ground_truth = IUPAC name
//   caption           query = molecule SMILES, ground_truth = same molecule
struct ReasoningSample {
  std::string id;
  TaskKind task = TaskKind::kMolRecognition;
  std::string query;
  std::string ground_truth;
  Anchors anchors;
  std::optional<std::string> generated_text;
  FilterVerdicts filter_verdicts;
  std::optional<std::string> image_ref;
  std::optional<Provenance> provenance;

  bool retained() const {
    return filter_verdicts.structural.passed()
           && filter_verdicts.consistency.passed()
           && filter_verdicts.verifier.passed();
  }

  // Throws Error(kInvalidRecord): empty id, or a SMILES query/ground truth
  // that does not parse.
  void validate() const;
};

// One molecule the anchors describe. Roles: "molecule", "reactant", "agent",
// "product".
struct AnchorTarget {
  std::string role;
  std::string smiles;
};

// Molecule tasks: the query as one target. Reactions: every dot-separated
// member of each role; for rxn_prediction the products come from the ground
// truth.
std::vector<AnchorTarget> anchor_targets(const ReasoningSample &sample);

// Sample store line (JSON object, keys as in the struct). Missing optional
// fields default; verdicts are {"status", "reason", "seq"} objects.
std::string sample_to_json(const ReasoningSample &sample);
// Throws Error(kInvalidRecord).
ReasoningSample sample_from_json(std::string_view line);

std::vector<ReasoningSample> read_samples(const std::string &path);
void write_samples(const std::string &path,
                   const std::vector<ReasoningSample> &samples);

std::string_view verdict_state_name(VerdictState s);

}  // namespace chemreason

#endif  // CHEMREASON_PIPELINE_SAMPLE_H_
