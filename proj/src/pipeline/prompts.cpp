#include "chemreason/pipeline/prompts.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/smiles.h"
#include "json.hpp"

namespace chemreason {
namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

std::string role_records(const ReasoningSample &sample,
                         const std::vector<AnchorTarget> &targets,
                         std::string_view role) {
  std::string out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].role != role)
      continue;
    std::optional<std::string> name;
    if (i < sample.anchors.iupac_names.size())
      name = sample.anchors.iupac_names[i];
    std::vector<std::string> groups;
    if (i < sample.anchors.functional_groups.size())
      groups = sample.anchors.functional_groups[i];
    if (!out.empty())
      out += '\n';
    out += anchor_record(targets[i].smiles, name, groups);
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::string task_question(const ReasoningSample &sample) {
  std::string q;
  switch (sample.task) {
  case TaskKind::kMolRecognition:
    q = "Work out the SMILES of the molecule shown in a chemical structure image.";
    break;
  case TaskKind::kRxnRecognition:
    q = "Work out the reaction SMILES (reactants>agents>products) of the scheme "
        "shown in an image.";
    break;
  case TaskKind::kRxnPrediction:
    q = "Predict the product SMILES of the reaction whose starting materials "
        "and conditions are shown in an image.";
    break;
  case TaskKind::kMolToIupac:
    q = "Give the IUPAC name of the molecule shown in a chemical structure image.";
    break;
  case TaskKind::kCaption:
    q = "Write the SMILES of the molecule described.";
    break;
  }
  // The starting materials belong to the question for prediction; for the
  // other tasks the query is the answer itself.
  if (sample.task == TaskKind::kRxnPrediction)
    q += fmt::format("\nStarting materials and conditions: {}", sample.query);
  return q;
}

std::vector<std::string> PromptTemplate::slots() const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find(kOpen, pos)) != std::string::npos) {
    const std::size_t end = text.find(kClose, pos + kOpen.size());
    if (end == std::string::npos)
      break;
    out.push_back(text.substr(pos + kOpen.size(), end - pos - kOpen.size()));
    pos = end + kClose.size();
  }
  return out;
}

std::string render_template(const PromptTemplate &tmpl,
                            const std::map<std::string, std::string> &values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = tmpl.text.find(kOpen, pos);
    if (open == std::string::npos) {
      out.append(tmpl.text, pos);
      return out;
    }
    out.append(tmpl.text, pos, open - pos);
    const std::size_t close = tmpl.text.find(kClose, open + kOpen.size());
    if (close == std::string::npos) {
      throw Error(ErrorCode::kMissingSlot,
                  fmt::format("template {}: unterminated slot", tmpl.id));
    }
    const std::string name =
        tmpl.text.substr(open + kOpen.size(), close - open - kOpen.size());
    auto it = values.find(name);
    if (it == values.end()) {
      throw Error(ErrorCode::kMissingSlot,
                  fmt::format("template {}: no value for slot '{}'", tmpl.id, name));
    }
    out += it->second;
    pos = close + kClose.size();
  }
}

void TemplateStore::load_directory(const std::string &dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot read {}: {}", dir, ec.message()));
  for (const auto &entry: it) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt")
      continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    add({ entry.path().stem().string(), buf.str() });
  }
}

void TemplateStore::add(PromptTemplate t) {
  std::string id = t.id;
  templates_[id] = std::move(t);
}

const PromptTemplate &TemplateStore::get(const std::string &id) const {
  auto it = templates_.find(id);
  if (it == templates_.end())
    throw Error(ErrorCode::kConfigError, fmt::format("unknown prompt template {}", id));
  return it->second;
}

std::string default_template_id(TaskKind task) {
  return fmt::format("{}.v1", task_kind_name(task));
}

DemoStore DemoStore::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open {}", path));
  DemoStore s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      auto j = nlohmann::json::parse(line);
      s.add({ j.at("id").get<std::string>(),
              parse_task_kind(j.at("task").get<std::string>()),
              j.at("text").get<std::string>() });
    } catch (const std::exception &e) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return s;
}

void DemoStore::add(Demo d) {
  std::string id = d.id;
  demos_[id] = std::move(d);
}

const Demo &DemoStore::get(const std::string &id) const {
  auto it = demos_.find(id);
  if (it == demos_.end())
    throw Error(ErrorCode::kUnknownDemo, fmt::format("unknown demonstration {}", id));
  return it->second;
}

std::vector<std::string> DemoStore::ids_for(TaskKind task) const {
  std::vector<std::string> out;
  for (const auto &[id, d]: demos_) {
    if (d.task == task)
      out.push_back(id);
  }
  return out;
}

std::string anchor_record(const std::string &smiles,
                          const std::optional<std::string> &iupac,
                          const std::vector<std::string> &groups) {
  nlohmann::ordered_json j;
  j["SMILES"] = smiles;
  j["IUPAC"] = iupac ? nlohmann::ordered_json(*iupac) : nlohmann::ordered_json(nullptr);
  j["Function Groups"] = groups;
  return j.dump();
}

std::string build_prompt(const ReasoningSample &sample, const PromptTemplate &tmpl,
                         const DemoStore &demos) {
  const auto targets = anchor_targets(sample);
  std::map<std::string, std::string> values;
  values["demos"] = sample.anchors.demo_id ? demos.get(*sample.anchors.demo_id).text
                                           : std::string("none");
  values["query"] = sample.query;
  values["ground_truth"] = sample.ground_truth;
  values["answer_tag"] =
      answer_kind_for(sample.task) == AnswerKind::kIupac ? "IUPAC" : "SMILES";
  values["molecule"] = role_records(sample, targets, "molecule");
  values["reactants"] = role_records(sample, targets, "reactant");
  values["agents"] = role_records(sample, targets, "agent");
  values["products"] = role_records(sample, targets, "product");
  return render_template(tmpl, values);
}

std::string build_verifier_prompt(const ReasoningSample &sample,
                                  const PromptTemplate &tmpl) {
  std::map<std::string, std::string> values;
  values["instruction"] = task_question(sample);
  values["answer_tag"] =
      answer_kind_for(sample.task) == AnswerKind::kIupac ? "IUPAC" : "SMILES";
  const std::string text = sample.generated_text.value_or("");
  const TraceLayout layout = validate_trace(text);
  values["reasoning"] = layout.think_span ? std::string(layout.think_span->of(text)) : text;
  values["caption"] = text;
  return render_template(tmpl, values);
}

}  // namespace chemreason
