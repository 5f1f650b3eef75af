#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "chemreason/canonical.h"
#include "chemreason/evalharness.h"
#include "chemreason/extraction.h"
#include "chemreason/pipeline/pipeline.h"
#include "chemreason/rlcore.h"
#include "chemreason/smiles.h"
#include "json.hpp"

namespace chemreason {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char &c: out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Perfect matching between two fragment lists under molecules_equal (small
// lists; augmenting paths).
bool fragments_match(const std::vector<MolGraph> &a, const std::vector<MolGraph> &b) {
  if (a.size() != b.size())
    return false;
  const std::size_t n = a.size();
  std::vector<std::vector<bool>> eq(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      eq[i][j] = molecules_equal(a[i], b[j]);
  }
  std::vector<int> owner(n, -1);
  std::function<bool(std::size_t, std::vector<bool> &)> augment =
      [&](std::size_t i, std::vector<bool> &seen) {
        for (std::size_t j = 0; j < n; ++j) {
          if (!eq[i][j] || seen[j])
            continue;
          seen[j] = true;
          if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]), seen)) {
            owner[j] = static_cast<int>(i);
            return true;
          }
        }
        return false;
      };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(n);
    if (!augment(i, seen))
      return false;
  }
  return true;
}

std::vector<MolGraph> parse_fragments(std::string_view text) {
  std::vector<MolGraph> out;
  for (const std::string &f: split_fragments(text))
    out.push_back(parse_smiles(f));
  return out;
}

bool smiles_match(std::string_view answer, std::string_view gt) {
  try {
    if (looks_like_reaction(gt)) {
      if (!looks_like_reaction(answer))
        return false;
      const ReactionGraph p = parse_reaction(answer);
      const ReactionGraph g = parse_reaction(gt);
      return fragments_match(p.reactants, g.reactants)
             && fragments_match(p.agents, g.agents)
             && fragments_match(p.products, g.products);
    }
    if (looks_like_reaction(answer))
      return false;
    return fragments_match(parse_fragments(answer), parse_fragments(gt));
  } catch (const Error &) {
    return false;
  }
}

Verdict verdict_from_reply(const ReasoningSample &sample, const std::string &reply,
                           AnswerKind kind) {
  const ExtractedAnswer ans = extract_answer(reply, kind);
  if (!ans.found())
    return Verdict::fail("no_answer");
  return answers_match(ans.value, sample) ? Verdict::pass() : Verdict::fail("mismatch");
}

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c: s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  out += '\'';
  return out;
}

}  // namespace

void StructuralRules::validate() const {
  if (min_think_tokens < 0 || max_think_tokens < min_think_tokens) {
    throw Error(ErrorCode::kConfigError,
                fmt::format("think token bounds [{}, {}] are invalid", min_think_tokens,
                            max_think_tokens));
  }
  for (const std::string &p: grounding_phrases) {
    if (p.empty())
      throw Error(ErrorCode::kConfigError, "empty grounding phrase");
  }
}

Verdict structural_filter(const ReasoningSample &sample, const StructuralRules &rules) {
  if (!sample.generated_text || sample.generated_text->empty())
    return Verdict::fail("no_text");
  const std::string &text = *sample.generated_text;
  std::string_view counted = text;
  if (sample.task != TaskKind::kCaption) {
    const TraceLayout layout = validate_trace(text);
    if (!layout.well_formed)
      return Verdict::fail("tags");
    counted = layout.think_span->of(text);
  }
  const std::string haystack = lower(text);
  const bool grounded =
      rules.grounding_phrases.empty()
      || std::any_of(rules.grounding_phrases.begin(), rules.grounding_phrases.end(),
                     [&](const std::string &p) {
                       return haystack.find(lower(p)) != std::string::npos;
                     });
  if (!grounded)
    return Verdict::fail("grounding");
  const auto tokens = WhitespacePunctTokenizer().tokenize(counted);
  const auto n = static_cast<long>(tokens.size());
  if (n < rules.min_think_tokens || n > rules.max_think_tokens)
    return Verdict::fail("length");
  return Verdict::pass();
}

bool answers_match(std::string_view answer, const ReasoningSample &sample) {
  if (answer_kind_for(sample.task) == AnswerKind::kIupac) {
    const std::string a = normalize_iupac(answer);
    return !a.empty() && a == normalize_iupac(sample.ground_truth);
  }
  return smiles_match(answer, sample.ground_truth);
}

Verdict consistency_filter(const ReasoningSample &sample) {
  if (!sample.filter_verdicts.structural.passed()) {
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("{}: consistency before a structural pass", sample.id));
  }
  // A caption has no final answer; its check is the reconstruction step.
  if (sample.task == TaskKind::kCaption)
    return Verdict::pass();
  return verdict_from_reply(sample, sample.generated_text.value_or(""),
                            answer_kind_for(sample.task));
}

Verdict verifier_filter(const ReasoningSample &sample, ChatClient &verifier,
                        const PromptTemplate &tmpl, const std::string &model) {
  if (!sample.filter_verdicts.consistency.passed()) {
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("{}: verifier before a consistency pass", sample.id));
  }
  ChatRequest req;
  req.model = model;
  req.messages.push_back({ "user", build_verifier_prompt(sample, tmpl) });
  req.tag = fmt::format("verify/{}/{}", sample.id, tmpl.id);
  const ChatResponse reply = verifier.complete(req);
  return verdict_from_reply(sample, reply.content, answer_kind_for(sample.task));
}

Verdict caption_reconstruction_filter(const ReasoningSample &sample, ChatClient &verifier,
                                      const PromptTemplate &tmpl,
                                      const std::string &model) {
  if (sample.task != TaskKind::kCaption || !sample.generated_text)
    throw Error(ErrorCode::kInvalidRecord, fmt::format("{}: no caption", sample.id));
  if (!sample.filter_verdicts.structural.passed()) {
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("{}: reconstruction before a structural pass", sample.id));
  }
  ChatRequest req;
  req.model = model;
  req.messages.push_back({ "user", build_verifier_prompt(sample, tmpl) });
  req.tag = fmt::format("verify/{}/{}", sample.id, tmpl.id);
  const ChatResponse reply = verifier.complete(req);
  return verdict_from_reply(sample, reply.content, AnswerKind::kSmiles);
}

ReasoningSample enrich_anchors(ReasoningSample sample, const Catalog &catalog,
                               NameLookupClient *names, const DemoStore &demos) {
  sample.validate();
  const auto targets = anchor_targets(sample);
  sample.anchors.iupac_names.assign(targets.size(), std::nullopt);
  sample.anchors.functional_groups.assign(targets.size(), {});
  for (std::size_t i = 0; i < targets.size(); ++i) {
    sample.anchors.functional_groups[i] =
        detect_functional_groups(parse_smiles(targets[i].smiles), catalog);
    if (names != nullptr)
      sample.anchors.iupac_names[i] = fetch_iupac(targets[i].smiles, *names);
  }
  const auto ids = demos.ids_for(sample.task);
  if (ids.empty()) {
    sample.anchors.demo_id.reset();
  } else {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c: sample.id) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    sample.anchors.demo_id = ids[h % ids.size()];
  }
  return sample;
}

Clock system_clock_utc() {
  return [] {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm {};
    gmtime_r(&t, &tm);
    std::array<char, 32> buf {};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf.data());
  };
}

ReasoningSample generate_trace(ReasoningSample sample, const GenerationConfig &config,
                               ChatClient &client, const TemplateStore &templates,
                               const DemoStore &demos, const Clock &clock) {
  const PromptTemplate &tmpl = templates.get(config.template_for(sample.task));
  ChatRequest req;
  req.model = config.generator.model;
  req.messages.push_back({ "user", build_prompt(sample, tmpl, demos) });
  req.temperature = config.temperature;
  req.max_tokens = config.max_output_tokens;
  req.tag = fmt::format("generate/{}/{}", sample.id, tmpl.id);
  ChatResponse reply = client.complete(req);
  sample.generated_text = std::move(reply.content);
  sample.provenance = Provenance { std::move(reply.model_id), clock() };
  sample.filter_verdicts = {};
  return sample;
}

InstructionRecord reformat_instruction(const ReasoningSample &sample) {
  sample.validate();
  InstructionRecord rec;
  rec.id = sample.id;
  rec.task = sample.task;
  rec.prompt = task_question(sample);
  switch (sample.task) {
  case TaskKind::kCaption:
    throw Error(ErrorCode::kInvalidRecord,
                fmt::format("{}: captions have no instruction form", sample.id));
  case TaskKind::kMolToIupac: {
    const bool named =
        !sample.anchors.iupac_names.empty() && sample.anchors.iupac_names[0].has_value();
    if (!named) {
      throw Error(ErrorCode::kMissingAnchor,
                  fmt::format("{}: no IUPAC name for {}", sample.id, sample.query));
    }
    rec.target = fmt::format("<IUPAC>{}</IUPAC>", *sample.anchors.iupac_names[0]);
    break;
  }
  default:
    rec.target = fmt::format("<SMILES>{}</SMILES>", sample.ground_truth);
    break;
  }
  return rec;
}

std::string instruction_to_json(const InstructionRecord &record) {
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["task"] = task_kind_name(record.task);
  j["prompt"] = record.prompt;
  j["target"] = record.target;
  return j.dump();
}

std::optional<std::string> render_image(const std::string &command,
                                        const std::string &smiles) {
  const std::string cmd = command + " " + shell_quote(smiles);
  FILE *pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr)
    return std::nullopt;
  std::string out;
  std::array<char, 512> buf {};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr)
    out += buf.data();
  const int status = pclose(pipe);
  if (status != 0)
    return std::nullopt;
  out = out.substr(0, out.find('\n'));
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
    out.pop_back();
  if (out.empty())
    return std::nullopt;
  return out;
}

RolloutPanel parse_rollout_panel(std::string_view json_line) {
  try {
    const auto j = nlohmann::json::parse(json_line);
    RolloutPanel p;
    p.id = j.at("id").get<std::string>();
    if (j.contains("correct")) {
      p.correct = j["correct"].get<std::vector<bool>>();
    } else {
      ReasoningSample s;
      s.id = p.id;
      s.task = parse_task_kind(j.at("task").get<std::string>());
      s.ground_truth = j.at("ground_truth").get<std::string>();
      const AnswerKind kind = answer_kind_for(s.task);
      if (kind == AnswerKind::kNone)
        throw Error(ErrorCode::kInvalidRecord, "captions have no verifiable answer");
      for (const auto &r: j.at("rollouts")) {
        const ExtractedAnswer a = extract_answer(r.get<std::string>(), kind);
        p.correct.push_back(a.found() && answers_match(a.value, s));
      }
    }
    if (p.correct.empty())
      throw Error(ErrorCode::kInvalidRecord, "panel without rollouts");
    return p;
  } catch (const Error &e) {
    throw Error(ErrorCode::kInvalidRecord, fmt::format("rollout panel: {}", e.what()));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidRecord, fmt::format("rollout panel: {}", e.what()));
  }
}

std::vector<RolloutPanel> read_rollout_panels(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kInvalidRecord, fmt::format("cannot open {}", path));
  std::vector<RolloutPanel> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(parse_rollout_panel(line));
    } catch (const Error &e) {
      throw Error(ErrorCode::kInvalidRecord, fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return out;
}

std::vector<RolloutPanel> difficulty_filter(const std::vector<RolloutPanel> &panels) {
  std::vector<RolloutPanel> out;
  for (const RolloutPanel &p: panels) {
    if (difficulty_retain(p.correct))
      out.push_back(p);
  }
  return out;
}

}  // namespace chemreason
