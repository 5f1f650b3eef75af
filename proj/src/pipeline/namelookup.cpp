#include "chemreason/pipeline/namelookup.h"

#include <fstream>

#include <fmt/format.h>

#include "chemreason/canonical.h"
#include "chemreason/smiles.h"
#include "json.hpp"

namespace chemreason {
namespace {

std::string canonical_key(const std::string &smiles) {
  return canonical_smiles(parse_smiles(smiles));
}

std::string cache_line(const std::string &smiles, const std::optional<std::string> &name) {
  nlohmann::ordered_json j;
  j["smiles"] = smiles;
  j["iupac"] = name ? nlohmann::ordered_json(*name) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

}  // namespace

HttpNameLookup::HttpNameLookup(std::string base_url,
                               std::shared_ptr<HttpTransport> transport,
                               RetryPolicy policy, Sleeper sleeper)
    : base_url_(std::move(base_url)), transport_(std::move(transport)),
      policy_(policy), sleeper_(std::move(sleeper)) {
  while (!base_url_.empty() && base_url_.back() == '/')
    base_url_.pop_back();
}

std::optional<std::string> HttpNameLookup::lookup(const std::string &smiles) {
  const std::string url = fmt::format("{}/compound/smiles/{}/property/IUPACName/JSON",
                                      base_url_, url_encode(smiles));
  std::string last_problem;
  auto backoff = policy_.initial_backoff;
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    if (attempt > 1) {
      sleeper_(backoff);
      backoff = std::min(policy_.max_backoff,
                         std::chrono::milliseconds(static_cast<long long>(
                             backoff.count() * policy_.multiplier)));
    }
    HttpResponse r;
    try {
      r = transport_->get(url, {});
    } catch (const ProviderError &e) {
      last_problem = e.what();
      continue;
    }
    if (r.status == 404)
      return std::nullopt;
    if (r.status != 200) {
      last_problem = fmt::format("HTTP {}", r.status);
      if (r.status == 429 || r.status >= 500)
        continue;
      break;
    }
    try {
      auto j = nlohmann::json::parse(r.body);
      const auto &props = j.at("PropertyTable").at("Properties");
      if (props.empty() || !props[0].contains("IUPACName"))
        return std::nullopt;
      return props[0]["IUPACName"].get<std::string>();
    } catch (const nlohmann::json::exception &e) {
      last_problem = fmt::format("malformed body: {}", e.what());
    }
  }
  throw Error(ErrorCode::kServiceUnavailable,
              fmt::format("name lookup for {} failed: {}", smiles, last_problem));
}

FixtureNameLookup FixtureNameLookup::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open {}", path));
  FixtureNameLookup f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      auto j = nlohmann::json::parse(line);
      std::optional<std::string> name;
      if (!j.at("iupac").is_null())
        name = j["iupac"].get<std::string>();
      f.add(j.at("smiles").get<std::string>(), name);
    } catch (const std::exception &e) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return f;
}

void FixtureNameLookup::add(const std::string &smiles, std::optional<std::string> name) {
  names_[canonical_key(smiles)] = std::move(name);
}

std::optional<std::string> FixtureNameLookup::lookup(const std::string &canonical) {
  auto it = names_.find(canonical);
  return it == names_.end() ? std::nullopt : it->second;
}

CachedNameLookup::CachedNameLookup(std::shared_ptr<NameLookupClient> inner,
                                   std::string cache_path)
    : inner_(std::move(inner)), cache_path_(std::move(cache_path)) {
  if (cache_path_.empty())
    return;
  std::ifstream in(cache_path_);
  std::string line;
  while (std::getline(in, line)) {
    try {
      auto j = nlohmann::json::parse(line);
      cache_[j.at("smiles").get<std::string>()] =
          j.at("iupac").is_null() ? std::nullopt
                                  : std::optional(j["iupac"].get<std::string>());
    } catch (const nlohmann::json::exception &) {
      // A torn last line from an interrupted run; the lookup is simply redone.
    }
  }
}

std::optional<std::string> CachedNameLookup::lookup(const std::string &canonical) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(canonical);
    if (it != cache_.end())
      return it->second;
  }
  std::optional<std::string> name = inner_->lookup(canonical);
  std::lock_guard lock(mu_);
  ++forwarded_;
  cache_[canonical] = name;
  if (!cache_path_.empty()) {
    std::ofstream out(cache_path_, std::ios::app);
    out << cache_line(canonical, name) << '\n';
  }
  return name;
}

std::optional<std::string> fetch_iupac(const std::string &smiles,
                                       NameLookupClient &client) {
  return client.lookup(canonical_key(smiles));
}

}  // namespace chemreason
