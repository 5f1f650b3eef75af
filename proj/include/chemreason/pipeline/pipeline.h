#ifndef CHEMREASON_PIPELINE_PIPELINE_H_
#define CHEMREASON_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreason/funcgroups.h"
#include "chemreason/pipeline/namelookup.h"
#include "chemreason/pipeline/prompts.h"
#include "chemreason/pipeline/providers.h"
#include "chemreason/pipeline/sample.h"

namespace chemreason {

// ---- filters ---------------------------------------------------------------

struct StructuralRules {
  // Matched case-insensitively anywhere in the text.
  std::vector<std::string> grounding_phrases { "image", "depict", "I see", "analyz" };
  // Bounds on the think-span token count (whitespace/punctuation tokens).
  int min_think_tokens = 64;
  int max_think_tokens = 4096;

  // Throws Error(kConfigError).
  void validate() const;
};

// Fail reasons: "no_text", "tags", "grounding", "length". Captions carry no
// tags; the length rule then counts the whole text.
Verdict structural_filter(const ReasoningSample &sample, const StructuralRules &rules = {});

// True when `answer` names the ground truth: molecules_equal per fragment
// (reactions: per role), normalized string equality for IUPAC names.
bool answers_match(std::string_view answer, const ReasoningSample &sample);

// Extracts the final answer and checks it against the ground truth. Fail
// reasons: "no_answer", "mismatch". Captions have no answer and pass.
// Throws Error(kInvalidRecord) unless the structural verdict is pass.
Verdict consistency_filter(const ReasoningSample &sample);

// Asks `verifier` to answer from the reasoning alone (ground truth withheld).
// Fail reasons: "no_answer", "mismatch". ProviderError propagates. Throws
// Error(kInvalidRecord) unless the consistency verdict is pass.
Verdict verifier_filter(const ReasoningSample &sample, ChatClient &verifier,
                        const PromptTemplate &tmpl, const std::string &model = {});

// Captions: the verifier sees only the caption and must recover the SMILES.
// Throws Error(kInvalidRecord) for non-caption samples, a missing caption or
// a structural verdict other than pass.
Verdict caption_reconstruction_filter(const ReasoningSample &sample, ChatClient &verifier,
                                      const PromptTemplate &tmpl,
                                      const std::string &model = {});

// ---- anchors, generation, instructions ---------------------------------------

// Functional groups and names per anchor target; a demonstration of the
// sample's task chosen by a hash of the id. `names` may be null (no names).
// Name lookup errors propagate.
ReasoningSample enrich_anchors(ReasoningSample sample, const Catalog &catalog,
                               NameLookupClient *names, const DemoStore &demos);

using Clock = std::function<std::string()>;
// UTC, "YYYY-MM-DDTHH:MM:SSZ".
Clock system_clock_utc();

struct GenerationConfig {
  // Empty: default_template_id(task).
  std::string prompt_template_id;
  std::string verifier_template_id = "verifier.v1";
  std::string caption_verifier_template_id = "caption_verifier.v1";
  EndpointSettings generator;
  EndpointSettings verifier;
  double temperature = 0.7;
  int max_output_tokens = 4096;
  int concurrency_limit = 4;
  RetryPolicy retry;
  long call_budget = -1;           // provider calls, both clients together
  double requests_per_second = 0;  // per provider; 0 disables
  StructuralRules structural;
  std::string checkpoint_path;     // empty: no checkpointing
  std::string render_command;      // empty: no rendering
  std::string template_dir;        // extra templates (<id>.txt)
  std::string demo_path;           // replaces the built-in demonstrations
  std::string name_service_url;    // empty: no name lookup
  std::string name_cache_path;

  // Throws Error(kConfigError).
  void validate() const;
  std::string template_for(TaskKind task) const;
};

// JSON document; keys mirror the fields (retry: {max_attempts,
// initial_backoff_ms, multiplier, max_backoff_ms}; structural:
// {grounding_phrases, min_think_tokens, max_think_tokens}; generator and
// verifier: {base_url, model, api_key_env}). Unknown keys are rejected.
GenerationConfig parse_generation_config(std::string_view json_text);
GenerationConfig load_generation_config(const std::string &path);

// Builds the prompt, calls the provider once (retries live in the client) and
// stores the reply verbatim with provenance. Verdicts are reset to pending.
// Request tag: "generate/<id>/<template id>".
ReasoningSample generate_trace(ReasoningSample sample, const GenerationConfig &config,
                               ChatClient &client, const TemplateStore &templates,
                               const DemoStore &demos, const Clock &clock);

struct InstructionRecord {
  std::string id;
  TaskKind task = TaskKind::kMolRecognition;
  std::string prompt;
  std::string target;  // "<SMILES>...</SMILES>" or "<IUPAC>...</IUPAC>"
};

// Direct question/answer record without reasoning. mol_to_iupac targets the
// name anchor of the molecule (Error(kMissingAnchor) if absent); captions are
// Error(kInvalidRecord).
InstructionRecord reformat_instruction(const ReasoningSample &sample);
std::string instruction_to_json(const InstructionRecord &record);

// Runs `command` with the SMILES as its last (shell-quoted) argument; the first
// line of its standard output is the image path. nullopt when the command
// fails or prints nothing.
std::optional<std::string> render_image(const std::string &command, const std::string &smiles);

// ---- difficulty filter -------------------------------------------------------

struct RolloutPanel {
  std::string id;
  std::vector<bool> correct;
};

// Lines {"id", "correct": [bool...]} or {"id", "task", "ground_truth",
// "rollouts": [text...]} (correctness = answers_match of the extracted answer).
// Throws Error(kInvalidRecord).
RolloutPanel parse_rollout_panel(std::string_view json_line);
std::vector<RolloutPanel> read_rollout_panels(const std::string &path);

// Panels with divergent outcomes.
std::vector<RolloutPanel> difficulty_filter(const std::vector<RolloutPanel> &panels);

// ---- reporting ---------------------------------------------------------------

struct StageCounts {
  long generated = 0;
  long pass_structural = 0;
  long pass_consistency = 0;
  long pass_verifier = 0;

  double retention_rate() const {
    return generated == 0 ? 0.0 : static_cast<double>(pass_verifier) / generated;
  }
  bool monotone() const {
    return generated >= pass_structural && pass_structural >= pass_consistency
           && pass_consistency >= pass_verifier && pass_verifier >= 0;
  }
};

struct RetentionReport {
  std::map<TaskKind, StageCounts> per_task;

  StageCounts total() const;
};

RetentionReport retention_report(const std::vector<ReasoningSample> &samples);
// Rows in task order then "total"; percentages with one decimal.
std::string format_retention_table(const RetentionReport &report);
std::string retention_report_json(const RetentionReport &report);

// ---- checkpointing -----------------------------------------------------------

// Append-only JSON lines {"stage": ..., "sample": {...}}; the last record of a
// sample id is its current state. A torn final line is ignored on load.
class Checkpoint {
public:
  explicit Checkpoint(std::string path);

  std::optional<ReasoningSample> latest(const std::string &id) const;
  void append(std::string_view stage, const ReasoningSample &sample);
  std::uint64_t max_seq() const { return max_seq_; }
  std::size_t records() const { return records_; }

private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, ReasoningSample> latest_;
  std::uint64_t max_seq_ = 0;
  std::size_t records_ = 0;
};

// ---- orchestration -----------------------------------------------------------

struct PipelineServices {
  ChatClient *generator = nullptr;
  ChatClient *verifier = nullptr;
  NameLookupClient *names = nullptr;  // optional
  TemplateStore templates = TemplateStore::defaults();
  DemoStore demos = DemoStore::defaults();
  const Catalog *catalog = nullptr;   // null: default_catalog()
  Clock clock = system_clock_utc();
};

struct PipelineResult {
  std::vector<ReasoningSample> samples;  // input order, final state
  std::vector<ReasoningSample> retained;
  RetentionReport report;
  // Samples left unfinished because a provider or the name service failed.
  long unfinished = 0;
  long render_failures = 0;
};

// enrich -> render -> generate -> structural -> consistency -> verifier, each
// stage checkpointed. Samples already decided in the checkpoint cost no calls.
// Per-sample provider failures leave the sample unfinished; configuration
// errors and Error(kBudgetExceeded) abort the run.
PipelineResult run_pipeline(const std::vector<ReasoningSample> &inputs,
                            const GenerationConfig &config, PipelineServices &services);

}  // namespace chemreason

#endif  // CHEMREASON_PIPELINE_PIPELINE_H_
