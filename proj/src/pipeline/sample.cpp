#include "chemreason/pipeline/sample.h"

#include <fstream>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/smiles.h"
#include "json.hpp"

namespace chemreason {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json verdict_json(const Verdict &v) {
  ordered_json j;
  j["status"] = verdict_state_name(v.state);
  j["reason"] = v.reason;
  j["seq"] = v.seq;
  return j;
}

Verdict verdict_from(const json &j) {
  Verdict v;
  if (j.is_null())
    return v;
  const std::string s = j.value("status", "pending");
  if (s == "pass")
    v.state = VerdictState::kPass;
  else if (s == "fail")
    v.state = VerdictState::kFail;
  else if (s != "pending")
    throw Error(ErrorCode::kInvalidRecord, fmt::format("bad verdict status '{}'", s));
  v.reason = j.value("reason", "");
  v.seq = j.value("seq", std::uint64_t { 0 });
  return v;
}

template <class T>
ordered_json optional_json(const std::optional<T> &v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<std::string> optional_string(const json &j, const char *key) {
  if (!j.contains(key) || j[key].is_null())
    return std::nullopt;
  return j[key].get<std::string>();
}

void check_parses(std::string_view text, const std::string &id, const char *what) {
  try {
    if (looks_like_reaction(text))
      parse_reaction(text);
    else
      parse_smiles(text);
  } catch (const ParseError &e) {
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("sample {}: {} does not parse: {}", id, what, e.what()));
  }
}

}  // namespace

std::string_view verdict_state_name(VerdictState s) {
  switch (s) {
  case VerdictState::kPending: return "pending";
  case VerdictState::kPass: return "pass";
  case VerdictState::kFail: return "fail";
  }
  return "pending";
}

void ReasoningSample::validate() const {
  if (id.empty())
    throw Error(ErrorCode::kInvalidRecord, "sample without id");
  check_parses(query, id, "query");
  if (answer_kind_for(task) != AnswerKind::kIupac)
    check_parses(ground_truth, id, "ground truth");
  else if (ground_truth.empty())
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("sample {}: empty ground truth", id));
}

std::vector<AnchorTarget> anchor_targets(const ReasoningSample &sample) {
  std::vector<AnchorTarget> out;
  if (!looks_like_reaction(sample.query)) {
    out.push_back({ "molecule", sample.query });
    return out;
  }
  std::vector<std::string> roles = split_reaction_roles(sample.query);
  if (sample.task == TaskKind::kRxnPrediction)
    roles[2] = sample.ground_truth;
  const char *names[] = { "reactant", "agent", "product" };
  for (int r = 0; r < 3; ++r) {
    if (roles[r].empty())
      continue;
    for (std::string &frag: split_fragments(roles[r]))
      out.push_back({ names[r], std::move(frag) });
  }
  return out;
}

std::string sample_to_json(const ReasoningSample &s) {
  ordered_json j;
  j["id"] = s.id;
  j["task"] = task_kind_name(s.task);
  j["query"] = s.query;
  j["ground_truth"] = s.ground_truth;
  ordered_json names = ordered_json::array();
  for (const auto &n: s.anchors.iupac_names)
    names.push_back(optional_json(n));
  j["anchors"]["iupac_names"] = names;
  j["anchors"]["functional_groups"] = s.anchors.functional_groups;
  j["anchors"]["demo_id"] = optional_json(s.anchors.demo_id);
  j["generated_text"] = optional_json(s.generated_text);
  j["filter_verdicts"]["structural"] = verdict_json(s.filter_verdicts.structural);
  j["filter_verdicts"]["consistency"] = verdict_json(s.filter_verdicts.consistency);
  j["filter_verdicts"]["verifier"] = verdict_json(s.filter_verdicts.verifier);
  j["image_ref"] = optional_json(s.image_ref);
  if (s.provenance) {
    j["provenance"]["model_id"] = s.provenance->model_id;
    j["provenance"]["timestamp"] = s.provenance->timestamp;
  } else {
    j["provenance"] = nullptr;
  }
  return j.dump();
}

ReasoningSample sample_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidRecord, fmt::format("bad JSON: {}", e.what()));
  }
  try {
    ReasoningSample s;
    s.id = j.at("id").get<std::string>();
    s.task = parse_task_kind(j.at("task").get<std::string>());
    s.query = j.at("query").get<std::string>();
    s.ground_truth = j.at("ground_truth").get<std::string>();
    if (j.contains("anchors") && j["anchors"].is_object()) {
      const json &a = j["anchors"];
      if (a.contains("iupac_names")) {
        for (const json &n: a["iupac_names"])
          s.anchors.iupac_names.push_back(
              n.is_null() ? std::nullopt : std::optional(n.get<std::string>()));
      }
      if (a.contains("functional_groups"))
        s.anchors.functional_groups =
            a["functional_groups"].get<std::vector<std::vector<std::string>>>();
      s.anchors.demo_id = optional_string(a, "demo_id");
    }
    s.generated_text = optional_string(j, "generated_text");
    if (j.contains("filter_verdicts") && j["filter_verdicts"].is_object()) {
      const json &v = j["filter_verdicts"];
      s.filter_verdicts.structural = verdict_from(v.value("structural", json()));
      s.filter_verdicts.consistency = verdict_from(v.value("consistency", json()));
      s.filter_verdicts.verifier = verdict_from(v.value("verifier", json()));
    }
    s.image_ref = optional_string(j, "image_ref");
    if (j.contains("provenance") && j["provenance"].is_object()) {
      s.provenance = Provenance { j["provenance"].value("model_id", ""),
                                  j["provenance"].value("timestamp", "") };
    }
    return s;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidRecord, fmt::format("bad sample: {}", e.what()));
  }
}

std::vector<ReasoningSample> read_samples(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kInvalidRecord, fmt::format("cannot open {}", path));
  std::vector<ReasoningSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(sample_from_json(line));
    } catch (const Error &e) {
      throw Error(e.code(), fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return out;
}

void write_samples(const std::string &path,
                   const std::vector<ReasoningSample> &samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot write {}", path));
  for (const ReasoningSample &s: samples)
    out << sample_to_json(s) << '\n';
}

}  // namespace chemreason
