#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "chemreason/canonical.h"
#include "chemreason/evalharness.h"
#include "chemreason/fingerprint.h"
#include "chemreason/funcgroups.h"
#include "chemreason/pipeline/pipeline.h"
#include "chemreason/rlcore.h"
#include "chemreason/similarity.h"
#include "chemreason/smiles.h"
#include "json.hpp"

namespace chemreason {
namespace {

using nlohmann::json;

constexpr const char *kApiKeyVar = "CHEMREASON_API_KEY";
constexpr const char *kBaseUrlVar = "CHEMREASON_BASE_URL";
constexpr const char *kCacheDirVar = "CHEMREASON_CACHE_DIR";

// Unreadable or unwritable files.
class IoError: public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_or(const char *name, std::string fallback = {}) {
  const char *v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// ---- I/O helpers -----------------------------------------------------------

struct Io {
  std::istream &in;
  std::ostream &out;
  std::ostream &err;
  int verbosity = 0;

  std::string slurp(const std::string &path) const {
    std::ostringstream buf;
    if (path == "-") {
      buf << in.rdbuf();
      return buf.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f)
      throw IoError(fmt::format("cannot open {}", path));
    buf << f.rdbuf();
    return buf.str();
  }

  // Non-blank lines with their 1-based line numbers.
  std::vector<std::pair<int, std::string>> lines(const std::string &path) const {
    std::istringstream s(slurp(path));
    std::vector<std::pair<int, std::string>> out_lines;
    std::string line;
    int n = 0;
    while (std::getline(s, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos)
        out_lines.emplace_back(n, line);
    }
    return out_lines;
  }

  // Writes to `path`, or to `out` when the path is empty or "-".
  void emit(const std::string &path, const std::string &text) const {
    if (path.empty() || path == "-") {
      out << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
      throw IoError(fmt::format("cannot write {}", path));
  }

  void note(const std::string &msg) const {
    if (verbosity > 0)
      err << msg << '\n';
  }
};

// Prefixes record errors with where they came from.
template<class F>
auto at_line(const std::string &path, int line, F &&f) {
  try {
    return f();
  } catch (const ParseError &e) {
    throw ParseError(e.code(), e.position(), fmt::format("{}:{}: {}", path, line, e.what()));
  } catch (const Error &e) {
    throw Error(e.code(), fmt::format("{}:{}: {}", path, line, e.what()));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidRecord, fmt::format("{}:{}: {}", path, line, e.what()));
  }
}

// ---- config file -------------------------------------------------------------

// {"generation": {...GenerationConfig...}, "reward": {...RewardSpec...}}
struct FileConfig {
  std::optional<GenerationConfig> generation;
  json reward = json::object();
};

FileConfig load_file_config(const Io &io, const std::string &path) {
  FileConfig c;
  if (path.empty())
    return c;
  json j;
  try {
    j = json::parse(io.slurp(path));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfigError, fmt::format("{}: {}", path, e.what()));
  }
  if (!j.is_object())
    throw Error(ErrorCode::kConfigError, fmt::format("{}: expected an object", path));
  for (const auto &[key, value]: j.items()) {
    if (key == "generation")
      c.generation = parse_generation_config(value.dump());
    else if (key == "reward")
      c.reward = value;
    else
      throw Error(ErrorCode::kConfigError, fmt::format("{}: unknown section '{}'", path, key));
  }
  return c;
}

RewardSpec reward_spec_from_json(const json &j) {
  RewardSpec spec;
  try {
    for (const auto &[key, value]: j.items()) {
      if (key == "variant")
        spec.variant = parse_accuracy_variant(value.get<std::string>());
      else if (key == "w_accuracy")
        spec.w_accuracy = value.get<double>();
      else if (key == "w_format")
        spec.w_format = value.get<double>();
      else if (key == "radius")
        spec.fingerprint.radius = value.get<int>();
      else if (key == "width")
        spec.fingerprint.width = value.get<int>();
      else if (key == "heavy_atom_guard")
        spec.heavy_atom_guard = value.get<bool>();
      else
        throw Error(ErrorCode::kConfigError, fmt::format("reward: unknown key '{}'", key));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfigError, fmt::format("reward: {}", e.what()));
  }
  return spec;
}

// ---- shared option groups -------------------------------------------------------

struct GlobalOptions {
  std::string config_path;
  int verbosity = 0;
  std::uint64_t seed = 0;
};

struct FingerprintOptions {
  int radius = 2;
  int width = 2048;

  void add_to(CLI::App *cmd) {
    cmd->add_option("--radius", radius, "Morgan radius")->capture_default_str();
    cmd->add_option("--width", width, "Fingerprint width in bits")->capture_default_str();
  }
  FingerprintParams params() const {
    FingerprintParams p { radius, width };
    p.validate();
    return p;
  }
};

// ---- molecule commands ------------------------------------------------------

std::string canonical_reaction(std::string_view text) {
  const ReactionGraph r = parse_reaction(text);
  auto role = [](const std::vector<MolGraph> &mols) {
    std::vector<std::string> parts;
    for (const MolGraph &m: mols)
      parts.push_back(canonical_smiles(m));
    std::sort(parts.begin(), parts.end());
    std::string joined;
    for (const auto &p: parts)
      joined += (joined.empty() ? "" : ".") + p;
    return joined;
  };
  return role(r.reactants) + ">" + role(r.agents) + ">" + role(r.products);
}

struct CanonicalizeCmd {
  std::string input = "-";
  std::vector<std::string> smiles;
  int respell = 0;

  void setup(CLI::App *cmd) {
    cmd->add_option("input", input, "File with one SMILES or reaction SMILES per line (- for stdin)")
        ->capture_default_str();
    cmd->add_option("-s,--smiles", smiles, "Canonicalize this string instead of reading input");
    cmd->add_option("--respell", respell,
                    "Also print N randomized spellings per molecule (uses --seed)")
        ->check(CLI::NonNegativeNumber);
  }

  int run(const Io &io, const GlobalOptions &g) const {
    std::vector<std::pair<int, std::string>> items;
    std::string source = input;
    if (!smiles.empty()) {
      source = "argument";
      for (std::size_t i = 0; i < smiles.size(); ++i)
        items.emplace_back(static_cast<int>(i + 1), smiles[i]);
    } else {
      items = io.lines(input);
    }
    std::mt19937_64 rng(g.seed);
    for (const auto &[n, text]: items) {
      at_line(source, n, [&] {
        if (looks_like_reaction(text)) {
          io.out << canonical_reaction(text) << '\n';
          return 0;
        }
        const MolGraph m = parse_smiles(text);
        io.out << canonical_smiles(m);
        for (int k = 0; k < respell; ++k)
          io.out << '\t' << write_smiles(m, WriteMode::randomized(rng()));
        io.out << '\n';
        return 0;
      });
    }
    return kExitOk;
  }
};

struct FingerprintCmd {
  std::string input = "-";
  FingerprintOptions fp;

  void setup(CLI::App *cmd) {
    cmd->add_option("input", input, "File with one SMILES per line (- for stdin)")
        ->capture_default_str();
    fp.add_to(cmd);
  }

  int run(const Io &io) const {
    const FingerprintParams params = fp.params();
    for (const auto &[n, text]: io.lines(input)) {
      const Fingerprint f = at_line(input, n, [&] {
        return morgan_fingerprint(parse_smiles(text), params);
      });
      json j;
      j["smiles"] = text;
      j["radius"] = params.radius;
      j["width"] = params.width;
      j["on_bits"] = f.on_bits();
      io.out << j.dump() << '\n';
    }
    return kExitOk;
  }
};

struct TanimotoCmd {
  std::string a;
  std::string b;
  FingerprintOptions fp;

  void setup(CLI::App *cmd) {
    cmd->add_option("a", a, "First SMILES or reaction SMILES")->required();
    cmd->add_option("b", b, "Second SMILES or reaction SMILES")->required();
    fp.add_to(cmd);
  }

  int run(const Io &io) const {
    const FingerprintParams params = fp.params();
    double value = 0.0;
    if (looks_like_reaction(a) || looks_like_reaction(b)) {
      value = compare_reactions(parse_reaction(a), parse_reaction(b), params).similarity;
    } else {
      value = tanimoto(morgan_fingerprint(parse_smiles(a), params),
                       morgan_fingerprint(parse_smiles(b), params));
    }
    io.out << fmt::format("{:.6f}\n", value);
    return kExitOk;
  }
};

struct GroupsCmd {
  std::string input = "-";
  std::string catalog_path;

  void setup(CLI::App *cmd) {
    cmd->add_option("input", input, "File with one SMILES per line (- for stdin)")
        ->capture_default_str();
    cmd->add_option("--catalog", catalog_path, "Pattern catalog replacing the built-in one");
  }

  int run(const Io &io) const {
    std::optional<Catalog> custom;
    if (!catalog_path.empty()) {
      try {
        custom = Catalog::parse(io.slurp(catalog_path));
      } catch (const Error &e) {
        throw Error(ErrorCode::kConfigError, fmt::format("{}: {}", catalog_path, e.what()));
      }
    }
    const Catalog &catalog = custom ? *custom : default_catalog();
    for (const auto &[n, text]: io.lines(input)) {
      const auto groups = at_line(input, n, [&] {
        return detect_functional_groups(parse_smiles(text), catalog);
      });
      json j;
      j["smiles"] = text;
      j["groups"] = groups;
      io.out << j.dump() << '\n';
    }
    return kExitOk;
  }
};

// ---- answer and reward commands ---------------------------------------------

struct ExtractCmd {
  std::vector<std::string> files;
  std::string kind = "smiles";

  void setup(CLI::App *cmd) {
    cmd->add_option("files", files, "Model output files, one output per file (- for stdin)")
        ->required();
    cmd->add_option("--kind", kind, "Expected answer kind")
        ->check(CLI::IsMember({ "smiles", "iupac" }))
        ->capture_default_str();
  }

  int run(const Io &io) const {
    const AnswerKind expected = kind == "iupac" ? AnswerKind::kIupac : AnswerKind::kSmiles;
    for (const std::string &f: files) {
      const std::string text = io.slurp(f);
      const ExtractedAnswer a = extract_answer(text, expected);
      json j;
      j["file"] = f;
      j["found"] = a.found();
      j["kind"] = answer_kind_name(a.kind);
      j["source"] = answer_source_name(a.source);
      j["value"] = a.value;
      j["well_formed"] = validate_trace(text).well_formed;
      io.out << j.dump() << '\n';
    }
    return kExitOk;
  }
};

struct RewardCmd {
  std::string pred;
  std::string out_path;
  std::string variant;
  std::optional<double> w_accuracy;
  std::optional<double> w_format;
  std::optional<int> radius;
  std::optional<int> width;
  bool no_guard = false;

  void setup(CLI::App *cmd) {
    cmd->add_option("--pred", pred,
                    "JSONL records with id, task, raw_output and ground_truth")
        ->required();
    cmd->add_option("--out", out_path, "Output JSONL (default stdout)");
    cmd->add_option("--variant", variant, "Accuracy variant")
        ->check(CLI::IsMember({ "struct_id", "dense_tanimoto", "exact_string" }));
    cmd->add_option("--w-accuracy", w_accuracy, "Weight of the accuracy term (default 0.9)");
    cmd->add_option("--w-format", w_format, "Weight of the format term (default 0.1)");
    cmd->add_option("--radius", radius, "Morgan radius (default 2)");
    cmd->add_option("--width", width, "Fingerprint width (default 2048)");
    cmd->add_flag("--no-heavy-atom-guard", no_guard,
                  "Allow exact credit when heavy-atom counts differ");
  }

  RewardSpec spec(const FileConfig &file) const {
    RewardSpec s = reward_spec_from_json(file.reward);
    if (!variant.empty())
      s.variant = parse_accuracy_variant(variant);
    if (w_accuracy)
      s.w_accuracy = *w_accuracy;
    if (w_format)
      s.w_format = *w_format;
    if (radius)
      s.fingerprint.radius = *radius;
    if (width)
      s.fingerprint.width = *width;
    if (no_guard)
      s.heavy_atom_guard = false;
    s.validate();
    return s;
  }

  int run(const Io &io, const FileConfig &file) const {
    const RewardSpec s = spec(file);
    std::string text;
    for (const auto &[n, line]: io.lines(pred)) {
      const EvalRecord rec = at_line(pred, n, [&] { return parse_eval_record(line); });
      const RewardOutcome r =
          composite_reward(rec.raw_output, rec.ground_truth, s, answer_kind_for(rec.task));
      nlohmann::ordered_json j;
      j["id"] = rec.id;
      j["accuracy"] = r.accuracy;
      j["format"] = r.format;
      j["composite"] = r.composite;
      j["similarity"] = r.similarity;
      j["source"] = answer_source_name(r.source);
      text += j.dump() + "\n";
    }
    io.emit(out_path, text);
    return kExitOk;
  }
};

struct AdvantagesCmd {
  std::string input = "-";
  std::string out_path;

  void setup(CLI::App *cmd) {
    cmd->add_option("input", input,
                    "JSONL groups: {\"rewards\": [...]} with optional ratios, lengths, "
                    "eps_low, eps_high (- for stdin)")
        ->capture_default_str();
    cmd->add_option("--out", out_path, "Output JSONL (default stdout)");
  }

  int run(const Io &io) const {
    std::string text;
    int kept = 0, total = 0;
    for (const auto &[n, line]: io.lines(input)) {
      nlohmann::ordered_json o = at_line(input, n, [&] {
        const json j = json::parse(line);
        DapoGroup g;
        g.rewards = j.at("rewards").get<std::vector<double>>();
        const auto adv = group_advantages(g.rewards);
        nlohmann::ordered_json r;
        if (j.contains("id"))
          r["id"] = j["id"];
        r["advantages"] = adv ? nlohmann::ordered_json(*adv) : nlohmann::ordered_json(nullptr);
        if (j.contains("ratios")) {
          g.ratios = j.at("ratios").get<std::vector<std::vector<double>>>();
          if (j.contains("lengths")) {
            g.lengths = j["lengths"].get<std::vector<int>>();
          } else {
            for (const auto &r_i: g.ratios)
              g.lengths.push_back(static_cast<int>(r_i.size()));
          }
          g.eps_low = j.value("eps_low", kDefaultEpsLow);
          g.eps_high = j.value("eps_high", kDefaultEpsHigh);
          g.validate();
          const auto obj = dapo_objective(g);
          r["objective"] = obj ? nlohmann::ordered_json(*obj) : nlohmann::ordered_json(nullptr);
        }
        return r;
      });
      ++total;
      kept += o["advantages"].is_null() ? 0 : 1;
      text += o.dump() + "\n";
    }
    io.emit(out_path, text);
    io.note(fmt::format("{} of {} groups have nonzero reward variance", kept, total));
    return kExitOk;
  }
};

// ---- pipeline commands ----------------------------------------------------------

// Generator stand-in for `filter`: every sample must already carry text.
std::string refuse_generation(const ChatRequest &r) {
  throw Error(ErrorCode::kInvalidRecord,
              fmt::format("{}: no generated_text; run generate first", r.tag));
}

struct PipelineCmd {
  bool generate = true;
  std::string input;
  std::string out_path;
  std::string retained_path;
  std::string instructions_path;
  std::string report_path;
  std::string report_json_path;
  std::string replay_path;
  std::string names_path;
  std::string checkpoint_path;
  std::optional<int> concurrency;
  std::optional<long> budget;

  void setup(CLI::App *cmd) {
    cmd->add_option("--input", input, "Input samples (JSONL)")->required();
    cmd->add_option("--out", out_path, "All samples with verdicts (JSONL)");
    cmd->add_option("--retained", retained_path, "Samples that passed every filter (JSONL)");
    cmd->add_option("--instructions", instructions_path,
                    "Instruction records built from retained samples (JSONL)");
    cmd->add_option("--report", report_path, "Retention table (default stdout)");
    cmd->add_option("--report-json", report_json_path, "Retention report as JSON");
    cmd->add_option("--replay", replay_path,
                    "Answer provider requests from this fixture instead of the network");
    cmd->add_option("--names", names_path, "Frozen SMILES-to-name table (JSONL)");
    cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file (overrides config)");
    cmd->add_option("--concurrency", concurrency, "Samples processed in parallel");
    cmd->add_option("--budget", budget, "Maximum provider calls (-1 for no cap)");
  }

  GenerationConfig config(const FileConfig &file) const {
    GenerationConfig c = file.generation.value_or(GenerationConfig {});
    if (!checkpoint_path.empty())
      c.checkpoint_path = checkpoint_path;
    if (concurrency)
      c.concurrency_limit = *concurrency;
    if (budget)
      c.call_budget = *budget;
    const std::string base = env_or(kBaseUrlVar);
    for (EndpointSettings *e: { &c.generator, &c.verifier }) {
      if (!base.empty())
        e->base_url = base;
      if (e->api_key_env.empty() && std::getenv(kApiKeyVar))
        e->api_key_env = kApiKeyVar;
    }
    if (c.name_cache_path.empty() && !c.name_service_url.empty()) {
      const std::string dir = env_or(kCacheDirVar);
      if (!dir.empty())
        c.name_cache_path = (std::filesystem::path(dir) / "names.jsonl").string();
    }
    c.validate();
    return c;
  }

  int run(const Io &io, const FileConfig &file) const {
    const GenerationConfig c = config(file);

    std::vector<ReasoningSample> inputs;
    for (const auto &[n, line]: io.lines(input))
      inputs.push_back(at_line(input, n, [&] { return sample_from_json(line); }));
    if (!generate) {
      for (const auto &s: inputs) {
        if (!s.generated_text)
          throw Error(ErrorCode::kInvalidRecord,
                      fmt::format("{}: sample {} has no generated_text", input, s.id));
      }
    }

    // Providers: replay fixture or live endpoint, wrapped with retry and budget.
    std::shared_ptr<ChatClient> gen_inner, ver_inner;
    if (!replay_path.empty()) {
      auto replay = std::make_shared<ReplayChatClient>(ReplayChatClient::load(replay_path));
      gen_inner = ver_inner = replay;
    } else {
      std::shared_ptr<HttpTransport> transport = make_http_transport();
      for (const EndpointSettings *e: { &c.generator, &c.verifier }) {
        if (e->base_url.empty() && (e == &c.verifier || generate)) {
          throw Error(ErrorCode::kConfigError,
                      fmt::format("no provider endpoint: set a base_url in the config, "
                                  "{} in the environment, or pass --replay", kBaseUrlVar));
        }
      }
      gen_inner = std::make_shared<HttpChatClient>(c.generator, transport);
      ver_inner = std::make_shared<HttpChatClient>(c.verifier, transport);
    }
    if (!generate)
      gen_inner = std::make_shared<MockChatClient>(refuse_generation);

    auto call_budget = std::make_shared<CallBudget>(c.call_budget);
    auto limiter = [&]() -> std::shared_ptr<RateLimiter> {
      if (c.requests_per_second <= 0)
        return nullptr;
      return std::make_shared<RateLimiter>(c.requests_per_second, 1.0);
    };
    ResilientChatClient gen(gen_inner, c.retry, call_budget, limiter());
    ResilientChatClient ver(ver_inner, c.retry, call_budget, limiter());

    PipelineServices svc;
    svc.generator = &gen;
    svc.verifier = &ver;
    if (!c.template_dir.empty())
      svc.templates.load_directory(c.template_dir);
    if (!c.demo_path.empty())
      svc.demos = DemoStore::load(c.demo_path);

    std::shared_ptr<NameLookupClient> names;
    if (!names_path.empty()) {
      names = std::make_shared<FixtureNameLookup>(FixtureNameLookup::load(names_path));
    } else if (!c.name_service_url.empty()) {
      auto http = std::make_shared<HttpNameLookup>(c.name_service_url, make_http_transport(),
                                                   c.retry);
      names = std::make_shared<CachedNameLookup>(http, c.name_cache_path);
    }
    svc.names = names.get();

    const PipelineResult result = run_pipeline(inputs, c, svc);

    auto jsonl = [](const std::vector<ReasoningSample> &samples) {
      std::string t;
      for (const auto &s: samples)
        t += sample_to_json(s) + "\n";
      return t;
    };
    if (!out_path.empty())
      io.emit(out_path, jsonl(result.samples));
    if (!retained_path.empty())
      io.emit(retained_path, jsonl(result.retained));
    if (!instructions_path.empty()) {
      std::string t;
      for (const auto &s: result.retained) {
        if (s.task == TaskKind::kCaption)
          continue;
        try {
          t += instruction_to_json(reformat_instruction(s)) + "\n";
        } catch (const Error &e) {
          if (e.code() != ErrorCode::kMissingAnchor)
            throw;
          io.err << fmt::format("skipping {}: {}\n", s.id, e.what());
        }
      }
      io.emit(instructions_path, t);
    }
    io.emit(report_path, format_retention_table(result.report));
    if (!report_json_path.empty())
      io.emit(report_json_path, retention_report_json(result.report) + "\n");
    io.note(fmt::format("provider calls: {}", call_budget->used()));
    if (result.render_failures > 0)
      io.err << fmt::format("{} samples could not be rendered\n", result.render_failures);
    if (result.unfinished > 0) {
      io.err << fmt::format("chemreason: ProviderError: {} samples unfinished; rerun with the "
                            "same checkpoint to resume\n",
                            result.unfinished);
      return kExitProvider;
    }
    return kExitOk;
  }
};

struct DifficultyCmd {
  std::string input = "-";
  std::string out_path;

  void setup(CLI::App *cmd) {
    cmd->add_option("input", input,
                    "JSONL panels: {\"id\", \"correct\": [4 booleans]} or {\"id\", \"task\", "
                    "\"ground_truth\", \"rollouts\": [texts]} (- for stdin)")
        ->capture_default_str();
    cmd->add_option("--out", out_path, "Kept panels (JSONL, default stdout)");
  }

  int run(const Io &io) const {
    std::vector<RolloutPanel> panels;
    for (const auto &[n, line]: io.lines(input))
      panels.push_back(at_line(input, n, [&] { return parse_rollout_panel(line); }));
    const auto kept = difficulty_filter(panels);
    std::string text;
    for (const auto &p: kept) {
      nlohmann::ordered_json j;
      j["id"] = p.id;
      j["correct"] = p.correct;
      text += j.dump() + "\n";
    }
    io.emit(out_path, text);
    io.note(fmt::format("kept {} of {} panels", kept.size(), panels.size()));
    return kExitOk;
  }
};

// ---- evaluation commands --------------------------------------------------------

struct EvaluateCmd {
  std::string pred;
  std::string out_path;
  std::string json_path;
  FingerprintOptions fp;

  void setup(CLI::App *cmd) {
    cmd->add_option("--pred", pred,
                    "JSONL records with id, task, raw_output and ground_truth")
        ->required();
    cmd->add_option("--out", out_path, "Report file (default stdout)");
    cmd->add_option("--json", json_path, "Overall metrics as JSON");
    fp.add_to(cmd);
  }

  int run(const Io &io) const {
    const FingerprintParams params = fp.params();
    std::vector<EvalRecord> records;
    for (const auto &[n, line]: io.lines(pred))
      records.push_back(at_line(pred, n, [&] { return parse_eval_record(line); }));
    std::map<TaskKind, std::vector<RecordScore>> by_task;
    std::vector<RecordScore> all;
    for (const auto &r: records) {
      const RecordScore s = score_record(r, params);
      by_task[r.task].push_back(s);
      all.push_back(s);
    }
    std::vector<std::pair<std::string, MetricSummary>> rows;
    for (const auto &[task, scores]: by_task)
      rows.emplace_back(std::string(task_kind_name(task)), summarize(scores));
    const MetricSummary overall = summarize(all);
    rows.emplace_back("overall", overall);
    io.emit(out_path, format_metric_table(rows));
    if (!json_path.empty())
      io.emit(json_path, metric_summary_json(overall) + "\n");
    io.note(fmt::format("{} records, {} with an extractable answer, {} parsed",
                        overall.n_total, overall.n_extracted, overall.n_parsed));
    return kExitOk;
  }
};

struct StatsCmd {
  std::string input = "-";
  std::string field = "generated_text";
  bool think_only = false;
  std::string tokenizer = "whitespace";
  std::string merges;

  void setup(CLI::App *cmd) {
    cmd->add_option("input", input, "JSONL records (- for stdin)")->capture_default_str();
    cmd->add_option("--field", field, "Text field to measure")->capture_default_str();
    cmd->add_flag("--think-only", think_only, "Count only the reasoning span when present");
    cmd->add_option("--tokenizer", tokenizer, "Tokenizer")
        ->check(CLI::IsMember({ "whitespace", "bpe" }))
        ->capture_default_str();
    cmd->add_option("--merges", merges, "Merge list for the bpe tokenizer");
  }

  int run(const Io &io) const {
    std::unique_ptr<Tokenizer> tok;
    if (tokenizer == "bpe") {
      if (merges.empty())
        throw Error(ErrorCode::kConfigError, "--tokenizer bpe needs --merges");
      tok = std::make_unique<BpeTokenizer>(BpeTokenizer::parse(io.slurp(merges)));
    } else {
      tok = std::make_unique<WhitespacePunctTokenizer>();
    }
    std::map<std::string, std::vector<std::string>> texts;
    std::vector<std::string> all;
    int skipped = 0;
    for (const auto &[n, line]: io.lines(input)) {
      at_line(input, n, [&] {
        const json j = json::parse(line);
        if (!j.contains(field) || !j[field].is_string()) {
          ++skipped;
          return 0;
        }
        std::string text = j[field].get<std::string>();
        if (think_only) {
          const TraceLayout t = validate_trace(text);
          if (t.think_span)
            text = std::string(t.think_span->of(text));
        }
        texts[j.value("task", std::string("all"))].push_back(text);
        all.push_back(text);
        return 0;
      });
    }
    std::vector<std::pair<std::string, TokenStats>> rows;
    for (const auto &[task, t]: texts)
      rows.emplace_back(task, token_stats(t, *tok));
    if (texts.size() > 1)
      rows.emplace_back("all", token_stats(all, *tok));
    io.out << format_token_table("Task", rows);
    if (skipped > 0)
      io.note(fmt::format("{} records had no '{}' text", skipped, field));
    return kExitOk;
  }
};

int exit_code_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::kConfigError:
  case ErrorCode::kInvalidSpec:
  case ErrorCode::kInvalidParams:
  case ErrorCode::kMissingSlot:
  case ErrorCode::kUnknownDemo:
    return kExitConfig;
  case ErrorCode::kProviderError:
  case ErrorCode::kServiceUnavailable:
  case ErrorCode::kBudgetExceeded:
    return kExitProvider;
  default:
    return kExitInput;
  }
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::istream &in, std::ostream &out,
            std::ostream &err) {
  CLI::App app { "Chemistry reasoning toolkit: structures, rewards, data pipeline, evaluation",
                 "chemreason" };
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path,
                 "JSON config with optional \"generation\" and \"reward\" sections");
  app.add_flag("-v,--verbose", g.verbosity, "More diagnostics on stderr");
  app.add_option("--seed", g.seed, "Seed for randomized output")->capture_default_str();
  app.footer(fmt::format("Environment: {} (API key, used when the config names none), {} "
                         "(provider base URL), {} (name cache directory).\n"
                         "Exit status: 0 ok, 1 input error, 2 configuration error, "
                         "3 provider error.",
                         kApiKeyVar, kBaseUrlVar, kCacheDirVar));

  CanonicalizeCmd canonicalize;
  FingerprintCmd fingerprint;
  TanimotoCmd tanimoto_cmd;
  GroupsCmd groups;
  ExtractCmd extract;
  RewardCmd reward;
  AdvantagesCmd advantages;
  PipelineCmd generate;
  PipelineCmd filter;
  filter.generate = false;
  DifficultyCmd difficulty;
  EvaluateCmd evaluate_cmd;
  StatsCmd stats;

  auto *c_canon = app.add_subcommand("canonicalize", "Print the canonical SMILES of each input");
  canonicalize.setup(c_canon);
  auto *c_fp = app.add_subcommand("fingerprint", "Print Morgan fingerprint bits per molecule");
  fingerprint.setup(c_fp);
  auto *c_tan = app.add_subcommand("tanimoto", "Tanimoto similarity of two structures");
  tanimoto_cmd.setup(c_tan);
  auto *c_groups = app.add_subcommand("groups", "Detect functional groups per molecule");
  groups.setup(c_groups);
  auto *c_extract = app.add_subcommand("extract", "Extract the final answer from model outputs");
  extract.setup(c_extract);
  auto *c_reward = app.add_subcommand("reward", "Score predictions with the composite reward");
  reward.setup(c_reward);
  auto *c_adv = app.add_subcommand("advantages", "Group-normalized advantages and DAPO objective");
  advantages.setup(c_adv);
  auto *c_gen = app.add_subcommand("generate", "Enrich, generate and filter reasoning traces");
  generate.setup(c_gen);
  auto *c_filter = app.add_subcommand("filter", "Filter samples that already carry traces");
  filter.setup(c_filter);
  auto *c_diff = app.add_subcommand("difficulty-filter",
                                    "Keep panels whose rollouts disagree on correctness");
  difficulty.setup(c_diff);
  auto *c_eval = app.add_subcommand("evaluate", "Avg similarity and Tani@1.0 per task");
  evaluate_cmd.setup(c_eval);
  auto *c_stats = app.add_subcommand("stats", "Token-length statistics per task");
  stats.setup(c_stats);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Io io { in, out, err, g.verbosity };
  try {
    const FileConfig file = load_file_config(io, g.config_path);
    if (*c_canon)
      return canonicalize.run(io, g);
    if (*c_fp)
      return fingerprint.run(io);
    if (*c_tan)
      return tanimoto_cmd.run(io);
    if (*c_groups)
      return groups.run(io);
    if (*c_extract)
      return extract.run(io);
    if (*c_reward)
      return reward.run(io, file);
    if (*c_adv)
      return advantages.run(io);
    if (*c_gen)
      return generate.run(io, file);
    if (*c_filter)
      return filter.run(io, file);
    if (*c_diff)
      return difficulty.run(io);
    if (*c_eval)
      return evaluate_cmd.run(io);
    if (*c_stats)
      return stats.run(io);
  } catch (const Error &e) {
    err << fmt::format("chemreason: {}: {}\n", error_code_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const IoError &e) {
    err << fmt::format("chemreason: IoError: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception &e) {
    err << fmt::format("chemreason: {}\n", e.what());
    return kExitInput;
  }
  return kExitConfig;
}

}  // namespace chemreason
