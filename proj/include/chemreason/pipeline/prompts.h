#ifndef CHEMREASON_PIPELINE_PROMPTS_H_
#define CHEMREASON_PIPELINE_PROMPTS_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreason/pipeline/sample.h"

namespace chemreason {

// Text with {{slot}} placeholders.
struct PromptTemplate {
  std::string id;
  std::string text;

  std::vector<std::string> slots() const;
};

// Substitutes every {{name}}; throws Error(kMissingSlot) for a name not in
// `values`. Unterminated "{{" is also a missing slot.
std::string render_template(const PromptTemplate &tmpl,
                            const std::map<std::string, std::string> &values);

class TemplateStore {
public:
  // Built-in templates: "<task>.v1" for every task, "verifier.v1" and
  // "caption_verifier.v1".
  static TemplateStore defaults();
  // Adds or replaces templates from every <id>.txt file in `dir`.
  void load_directory(const std::string &dir);

  void add(PromptTemplate t);
  // Throws Error(kConfigError) when absent.
  const PromptTemplate &get(const std::string &id) const;
  bool contains(const std::string &id) const { return templates_.count(id) > 0; }

private:
  std::map<std::string, PromptTemplate> templates_;
};

// Template used for a task when the configuration does not name one.
std::string default_template_id(TaskKind task);

struct Demo {
  std::string id;
  TaskKind task = TaskKind::kMolRecognition;
  std::string text;
};

class DemoStore {
public:
  // Three demonstrations per task.
  static DemoStore defaults();
  // JSON lines {"id", "task", "text"}; replaces the store's contents.
  static DemoStore load(const std::string &path);

  void add(Demo d);
  // Throws Error(kUnknownDemo).
  const Demo &get(const std::string &id) const;
  std::vector<std::string> ids_for(TaskKind task) const;

private:
  std::map<std::string, Demo> demos_;
};

// Anchor record of one molecule: {"SMILES": ..., "IUPAC": ..., "Function
// Groups": [...]}, IUPAC null when unknown.
std::string anchor_record(const std::string &smiles,
                          const std::optional<std::string> &iupac,
                          const std::vector<std::string> &groups);

// Slots: demos, query, ground_truth, answer_tag, molecule, reactants, agents,
// products (one anchor record per line, "none" when the role is empty); demos
// is "none" when no demonstration is assigned.
// Throws Error(kMissingSlot) or Error(kUnknownDemo).
std::string build_prompt(const ReasoningSample &sample, const PromptTemplate &tmpl,
                         const DemoStore &demos);

// The question a model answers for the sample, without the image. Only the
// prediction task includes its query (the starting materials).
std::string task_question(const ReasoningSample &sample);

// Verifier prompts never include the ground truth. Slots: instruction
// (task_question), reasoning (think span, or the whole text), caption,
// answer_tag.
std::string build_verifier_prompt(const ReasoningSample &sample,
                                  const PromptTemplate &tmpl);

}  // namespace chemreason

#endif  // CHEMREASON_PIPELINE_PROMPTS_H_
