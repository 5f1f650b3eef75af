#include "chemreason/pipeline/providers.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"

namespace chemreason {

ChatResponse MockChatClient::complete(const ChatRequest &request) {
  ++calls_;
  return { handler_(request), model_id_ };
}

ReplayChatClient ReplayChatClient::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open replay file {}", path));
  ReplayChatClient c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      auto j = nlohmann::json::parse(line);
      c.add(j.at("tag").get<std::string>(), j.at("content").get<std::string>(),
            j.value("model_id", "replay"));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return c;
}

void ReplayChatClient::add(std::string tag, std::string content,
                           std::string model_id) {
  replies_[std::move(tag)] = { std::move(content), std::move(model_id) };
}

ChatResponse ReplayChatClient::complete(const ChatRequest &request) {
  ++calls_;
  auto it = replies_.find(request.tag);
  if (it == replies_.end())
    throw ProviderError(404, fmt::format("no recorded reply for '{}'", request.tag));
  return it->second;
}

HttpChatClient::HttpChatClient(EndpointSettings settings,
                               std::shared_ptr<HttpTransport> transport)
    : settings_(std::move(settings)), transport_(std::move(transport)) { }

ChatResponse HttpChatClient::complete(const ChatRequest &request) {
  nlohmann::ordered_json body;
  body["model"] = request.model.empty() ? settings_.model : request.model;
  body["messages"] = nlohmann::ordered_json::array();
  for (const ChatMessage &m: request.messages)
    body["messages"].push_back({ { "role", m.role }, { "content", m.content } });
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;

  HttpHeaders headers;
  if (!settings_.api_key_env.empty()) {
    const char *key = std::getenv(settings_.api_key_env.c_str());
    if (!key || !*key) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("environment variable {} is not set",
                              settings_.api_key_env));
    }
    headers.emplace_back("Authorization", fmt::format("Bearer {}", key));
  }
  std::string base = settings_.base_url;
  while (!base.empty() && base.back() == '/')
    base.pop_back();
  HttpResponse r = transport_->post(base + "/chat/completions", headers, body.dump(),
                                    "application/json");
  if (r.status != 200) {
    throw ProviderError(r.status, fmt::format("chat completion failed with HTTP {}: {}",
                                              r.status, r.body.substr(0, 200)));
  }
  try {
    auto j = nlohmann::json::parse(r.body);
    ChatResponse out;
    out.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    out.model_id = j.value("model", body["model"].get<std::string>());
    return out;
  } catch (const nlohmann::json::exception &e) {
    // A malformed 200 is treated like a server fault so it is retried.
    throw ProviderError(502, fmt::format("malformed chat reply: {}", e.what()));
  }
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void CallBudget::consume() {
  if (remaining_.load() < 0) {
    ++used_;
    return;
  }
  long cur = remaining_.load();
  while (true) {
    if (cur <= 0)
      throw Error(ErrorCode::kBudgetExceeded,
                  fmt::format("provider call budget exhausted after {} calls",
                              used_.load()));
    if (remaining_.compare_exchange_weak(cur, cur - 1))
      break;
  }
  ++used_;
}

RateLimiter::RateLimiter(double per_second, double burst)
    : rate_(per_second), burst_(std::max(1.0, burst)), tokens_(burst_),
      last_(std::chrono::steady_clock::now()) { }

void RateLimiter::acquire() {
  if (rate_ <= 0.0)
    return;
  std::unique_lock lock(mu_);
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_;
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

ResilientChatClient::ResilientChatClient(std::shared_ptr<ChatClient> inner,
                                         RetryPolicy policy,
                                         std::shared_ptr<CallBudget> budget,
                                         std::shared_ptr<RateLimiter> limiter,
                                         Sleeper sleeper)
    : inner_(std::move(inner)), policy_(policy), budget_(std::move(budget)),
      limiter_(std::move(limiter)), sleeper_(std::move(sleeper)) { }

ChatResponse ResilientChatClient::complete(const ChatRequest &request) {
  auto backoff = policy_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    if (budget_)
      budget_->consume();
    if (limiter_)
      limiter_->acquire();
    try {
      return inner_->complete(request);
    } catch (const ProviderError &e) {
      if (!e.retryable() || attempt >= policy_.max_attempts)
        throw;
    }
    ++retries_;
    sleeper_(backoff);
    backoff = std::min(policy_.max_backoff,
                       std::chrono::milliseconds(static_cast<long long>(
                           backoff.count() * policy_.multiplier)));
  }
}

}  // namespace chemreason
