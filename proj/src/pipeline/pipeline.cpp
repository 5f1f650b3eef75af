#include "chemreason/pipeline/pipeline.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"

namespace chemreason {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json &j, std::initializer_list<const char *> known,
                         std::string_view where) {
  if (!j.is_object())
    throw Error(ErrorCode::kConfigError, fmt::format("{} must be an object", where));
  for (const auto &item: j.items()) {
    bool ok = false;
    for (const char *k: known)
      ok = ok || item.key() == k;
    if (!ok) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("unknown key '{}' in {}", item.key(), where));
    }
  }
}

EndpointSettings parse_endpoint(const json &j, std::string_view where) {
  reject_unknown_keys(j, { "base_url", "model", "api_key_env" }, where);
  EndpointSettings e;
  e.base_url = j.value("base_url", "");
  e.model = j.value("model", "");
  e.api_key_env = j.value("api_key_env", "");
  return e;
}

ordered_json counts_json(std::string_view name, const StageCounts &c) {
  ordered_json j;
  j["task"] = name;
  j["generated"] = c.generated;
  j["pass_structural"] = c.pass_structural;
  j["pass_consistency"] = c.pass_consistency;
  j["pass_verifier"] = c.pass_verifier;
  j["retention_rate"] = c.retention_rate();
  return j;
}

std::string counts_row(std::string_view name, const StageCounts &c) {
  return fmt::format("{:<18}{:>11}{:>12}{:>13}{:>10}{:>11.1f}\n", name, c.generated,
                     c.pass_structural, c.pass_consistency, c.pass_verifier,
                     100.0 * c.retention_rate());
}

// Text the render hook draws: the molecule, or the visible side of a reaction.
std::string render_subject(const ReasoningSample &s) {
  return s.query;
}

bool is_transient(const Error &e) {
  return e.code() == ErrorCode::kProviderError || e.code() == ErrorCode::kServiceUnavailable;
}

}  // namespace

void GenerationConfig::validate() const {
  auto bad = [](const std::string &why) { throw Error(ErrorCode::kConfigError, why); };
  if (concurrency_limit < 1)
    bad(fmt::format("concurrency_limit must be >= 1 (got {})", concurrency_limit));
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    bad(fmt::format("temperature must be >= 0 (got {})", temperature));
  if (max_output_tokens < 1)
    bad("max_output_tokens must be positive");
  if (retry.max_attempts < 1)
    bad("retry.max_attempts must be >= 1");
  if (retry.initial_backoff.count() < 0 || retry.max_backoff.count() < 0)
    bad("retry backoff must be non-negative");
  if (!(retry.multiplier >= 1.0))
    bad("retry.multiplier must be >= 1");
  if (!(requests_per_second >= 0.0))
    bad("requests_per_second must be >= 0");
  if (verifier_template_id.empty() || caption_verifier_template_id.empty())
    bad("verifier template ids must be set");
  structural.validate();
}

std::string GenerationConfig::template_for(TaskKind task) const {
  if (prompt_template_id.empty())
    return default_template_id(task);
  std::string id = prompt_template_id;
  const auto pos = id.find("{task}");
  if (pos != std::string::npos)
    id.replace(pos, 6, task_kind_name(task));
  return id;
}

GenerationConfig parse_generation_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfigError, fmt::format("config is not JSON: {}", e.what()));
  }
  GenerationConfig c;
  try {
    reject_unknown_keys(j,
                        { "prompt_template_id", "verifier_template_id",
                          "caption_verifier_template_id", "generator", "verifier",
                          "temperature", "max_output_tokens", "concurrency_limit", "retry",
                          "call_budget", "requests_per_second", "structural",
                          "checkpoint_path", "render_command", "template_dir", "demo_path",
                          "name_service_url", "name_cache_path" },
                        "config");
    c.prompt_template_id = j.value("prompt_template_id", c.prompt_template_id);
    c.verifier_template_id = j.value("verifier_template_id", c.verifier_template_id);
    c.caption_verifier_template_id =
        j.value("caption_verifier_template_id", c.caption_verifier_template_id);
    if (j.contains("generator"))
      c.generator = parse_endpoint(j["generator"], "generator");
    if (j.contains("verifier"))
      c.verifier = parse_endpoint(j["verifier"], "verifier");
    c.temperature = j.value("temperature", c.temperature);
    c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
    c.concurrency_limit = j.value("concurrency_limit", c.concurrency_limit);
    if (j.contains("retry")) {
      const json &r = j["retry"];
      reject_unknown_keys(r, { "max_attempts", "initial_backoff_ms", "multiplier",
                               "max_backoff_ms" }, "retry");
      c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
      c.retry.initial_backoff = std::chrono::milliseconds(
          r.value("initial_backoff_ms", static_cast<long long>(c.retry.initial_backoff.count())));
      c.retry.multiplier = r.value("multiplier", c.retry.multiplier);
      c.retry.max_backoff = std::chrono::milliseconds(
          r.value("max_backoff_ms", static_cast<long long>(c.retry.max_backoff.count())));
    }
    c.call_budget = j.value("call_budget", c.call_budget);
    c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
    if (j.contains("structural")) {
      const json &s = j["structural"];
      reject_unknown_keys(s, { "grounding_phrases", "min_think_tokens", "max_think_tokens" },
                          "structural");
      c.structural.grounding_phrases =
          s.value("grounding_phrases", c.structural.grounding_phrases);
      c.structural.min_think_tokens = s.value("min_think_tokens", c.structural.min_think_tokens);
      c.structural.max_think_tokens = s.value("max_think_tokens", c.structural.max_think_tokens);
    }
    c.checkpoint_path = j.value("checkpoint_path", c.checkpoint_path);
    c.render_command = j.value("render_command", c.render_command);
    c.template_dir = j.value("template_dir", c.template_dir);
    c.demo_path = j.value("demo_path", c.demo_path);
    c.name_service_url = j.value("name_service_url", c.name_service_url);
    c.name_cache_path = j.value("name_cache_path", c.name_cache_path);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfigError, fmt::format("config: {}", e.what()));
  }
  c.validate();
  return c;
}

GenerationConfig load_generation_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open {}", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_generation_config(buf.str());
}

StageCounts RetentionReport::total() const {
  StageCounts t;
  for (const auto &[task, c]: per_task) {
    t.generated += c.generated;
    t.pass_structural += c.pass_structural;
    t.pass_consistency += c.pass_consistency;
    t.pass_verifier += c.pass_verifier;
  }
  return t;
}

RetentionReport retention_report(const std::vector<ReasoningSample> &samples) {
  RetentionReport r;
  for (const ReasoningSample &s: samples) {
    StageCounts &c = r.per_task[s.task];
    if (!s.generated_text)
      continue;
    ++c.generated;
    const FilterVerdicts &v = s.filter_verdicts;
    if (!v.structural.passed())
      continue;
    ++c.pass_structural;
    if (!v.consistency.passed())
      continue;
    ++c.pass_consistency;
    if (v.verifier.passed())
      ++c.pass_verifier;
  }
  return r;
}

std::string format_retention_table(const RetentionReport &report) {
  std::string out = fmt::format("{:<18}{:>11}{:>12}{:>13}{:>10}{:>11}\n", "Task", "Generated",
                                "Structural", "Consistency", "Verifier", "Retained%");
  for (const auto &[task, c]: report.per_task)
    out += counts_row(task_kind_name(task), c);
  out += counts_row("total", report.total());
  return out;
}

std::string retention_report_json(const RetentionReport &report) {
  ordered_json j;
  j["tasks"] = ordered_json::array();
  for (const auto &[task, c]: report.per_task)
    j["tasks"].push_back(counts_json(task_kind_name(task), c));
  j["total"] = counts_json("total", report.total());
  return j.dump();
}

Checkpoint::Checkpoint(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      const json j = json::parse(line);
      ReasoningSample s = sample_from_json(j.at("sample").dump());
      for (const Verdict *v: { &s.filter_verdicts.structural, &s.filter_verdicts.consistency,
                               &s.filter_verdicts.verifier })
        max_seq_ = std::max(max_seq_, v->seq);
      std::string id = s.id;
      latest_[id] = std::move(s);
      ++records_;
    } catch (const std::exception &) {
      // Torn write from an interrupted run; that stage is simply redone.
    }
  }
}

std::optional<ReasoningSample> Checkpoint::latest(const std::string &id) const {
  std::lock_guard lock(mu_);
  auto it = latest_.find(id);
  if (it == latest_.end())
    return std::nullopt;
  return it->second;
}

void Checkpoint::append(std::string_view stage, const ReasoningSample &sample) {
  ordered_json j;
  j["stage"] = stage;
  j["sample"] = ordered_json::parse(sample_to_json(sample));
  const std::string line = j.dump() + "\n";
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << line;
  out.flush();
  if (!out)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot write checkpoint {}", path_));
  latest_[sample.id] = sample;
  ++records_;
}

PipelineResult run_pipeline(const std::vector<ReasoningSample> &inputs,
                            const GenerationConfig &config, PipelineServices &services) {
  config.validate();
  if (services.generator == nullptr || services.verifier == nullptr)
    throw Error(ErrorCode::kConfigError, "pipeline needs a generator and a verifier client");
  std::set<std::string> ids;
  for (const ReasoningSample &s: inputs) {
    s.validate();
    if (!ids.insert(s.id).second)
      throw Error(ErrorCode::kInvalidRecord, fmt::format("duplicate sample id {}", s.id));
  }
  // Resolve every template up front so a typo aborts before any call.
  for (const ReasoningSample &s: inputs)
    services.templates.get(config.template_for(s.task));
  const PromptTemplate &verifier_tmpl = services.templates.get(config.verifier_template_id);
  const PromptTemplate &caption_tmpl =
      services.templates.get(config.caption_verifier_template_id);
  const Catalog &catalog = services.catalog ? *services.catalog : default_catalog();

  std::unique_ptr<Checkpoint> checkpoint;
  if (!config.checkpoint_path.empty())
    checkpoint = std::make_unique<Checkpoint>(config.checkpoint_path);
  std::atomic<std::uint64_t> next_seq { checkpoint ? checkpoint->max_seq() + 1 : 1 };

  PipelineResult result;
  result.samples.resize(inputs.size());
  std::atomic<long> unfinished { 0 };
  std::atomic<long> render_failures { 0 };
  std::atomic<std::size_t> next_index { 0 };
  std::atomic<bool> stop { false };
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto decide = [&](Verdict v) {
    v.seq = next_seq.fetch_add(1);
    return v;
  };

  // Works in place so a provider failure keeps the stages already done.
  auto process = [&](ReasoningSample &s) {
    auto save = [&](std::string_view stage) {
      if (checkpoint)
        checkpoint->append(stage, s);
    };
    if (s.anchors.functional_groups.empty()) {
      s = enrich_anchors(s, catalog, services.names, services.demos);
      save("enrich");
    }
    if (!config.render_command.empty() && !s.image_ref) {
      s.image_ref = render_image(config.render_command, render_subject(s));
      if (s.image_ref)
        save("render");
      else
        ++render_failures;
    }
    if (!s.generated_text) {
      s = generate_trace(s, config, *services.generator, services.templates,
                         services.demos, services.clock);
      save("generate");
    }
    FilterVerdicts &v = s.filter_verdicts;
    if (v.structural.pending()) {
      v.structural = decide(structural_filter(s, config.structural));
      save("structural");
    }
    if (v.structural.passed() && v.consistency.pending()) {
      v.consistency = decide(consistency_filter(s));
      save("consistency");
    }
    if (v.consistency.passed() && v.verifier.pending()) {
      v.verifier = decide(s.task == TaskKind::kCaption
                              ? caption_reconstruction_filter(s, *services.verifier,
                                                              caption_tmpl,
                                                              config.verifier.model)
                              : verifier_filter(s, *services.verifier, verifier_tmpl,
                                                config.verifier.model));
      save("verifier");
    }
  };

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next_index.fetch_add(1);
      if (i >= inputs.size())
        return;
      std::optional<ReasoningSample> resumed;
      if (checkpoint)
        resumed = checkpoint->latest(inputs[i].id);
      ReasoningSample current = resumed ? *resumed : inputs[i];
      try {
        process(current);
        result.samples[i] = std::move(current);
      } catch (const Error &e) {
        if (is_transient(e)) {
          ++unfinished;
          result.samples[i] = std::move(current);
          continue;
        }
        std::lock_guard lock(error_mu);
        if (!first_error)
          first_error = std::current_exception();
        stop = true;
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error)
          first_error = std::current_exception();
        stop = true;
      }
    }
  };

  const int n_workers =
      static_cast<int>(std::min<std::size_t>(config.concurrency_limit, inputs.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_workers; ++t)
      pool.emplace_back(worker);
  }
  if (first_error)
    std::rethrow_exception(first_error);

  for (const ReasoningSample &s: result.samples) {
    if (s.retained())
      result.retained.push_back(s);
  }
  result.report = retention_report(result.samples);
  result.unfinished = unfinished.load();
  result.render_failures = render_failures.load();
  return result;
}

}  // namespace chemreason
