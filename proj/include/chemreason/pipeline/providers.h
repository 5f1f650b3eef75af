#ifndef CHEMREASON_PIPELINE_PROVIDERS_H_
#define CHEMREASON_PIPELINE_PROVIDERS_H_

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "chemreason/error.h"

namespace chemreason {

// Provider failure with the HTTP status (0 for transport errors) so retry
// logic can tell transient failures from permanent ones.
class ProviderError: public Error {
public:
  ProviderError(int status, const std::string &what)
      : Error(ErrorCode::kProviderError, what), status_(status) { }

  int status() const noexcept { return status_; }
  // 429, 5xx and transport failures.
  bool retryable() const noexcept {
    return status_ == 0 || status_ == 429 || status_ >= 500;
  }

private:
  int status_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
public:
  virtual ~HttpTransport() = default;
  // Throws ProviderError(0, ...) when no response was received.
  virtual HttpResponse get(const std::string &url, const HttpHeaders &headers) = 0;
  virtual HttpResponse post(const std::string &url, const HttpHeaders &headers,
                            const std::string &body,
                            const std::string &content_type) = 0;
};

// cpp-httplib backed; https URLs use OpenSSL.
std::unique_ptr<HttpTransport> make_http_transport(
    std::chrono::seconds timeout = std::chrono::seconds(60));

std::string url_encode(std::string_view text);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  // Caller-chosen identity of the request ("generate/<sample>/<template>").
  // Replay fixtures are keyed by it; it is never sent over the wire.
  std::string tag;
};

struct ChatResponse {
  std::string content;
  std::string model_id;
};

class ChatClient {
public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest &request) = 0;
};

// Answers from a function; counts calls.
class MockChatClient: public ChatClient {
public:
  using Handler = std::function<std::string(const ChatRequest &)>;

  explicit MockChatClient(Handler handler, std::string model_id = "mock")
      : handler_(std::move(handler)), model_id_(std::move(model_id)) { }

  ChatResponse complete(const ChatRequest &request) override;
  int calls() const { return calls_.load(); }

private:
  Handler handler_;
  std::string model_id_;
  std::atomic<int> calls_ { 0 };
};

// Serves recorded replies. Fixture lines: {"tag": ..., "content": ...,
// "model_id": optional}. A request whose tag is missing raises
// ProviderError(404).
class ReplayChatClient: public ChatClient {
public:
  static ReplayChatClient load(const std::string &path);
  void add(std::string tag, std::string content, std::string model_id = "replay");

  ChatResponse complete(const ChatRequest &request) override;
  int calls() const { return calls_.load(); }
  std::size_t size() const { return replies_.size(); }

  ReplayChatClient() = default;
  ReplayChatClient(ReplayChatClient &&other) noexcept
      : replies_(std::move(other.replies_)) { }

private:
  std::map<std::string, ChatResponse> replies_;
  std::atomic<int> calls_ { 0 };
};

struct EndpointSettings {
  std::string base_url;
  std::string model;
  std::string api_key_env;  // environment variable holding the bearer token
};

// POST {base}/chat/completions; reply at choices[0].message.content.
class HttpChatClient: public ChatClient {
public:
  HttpChatClient(EndpointSettings settings, std::shared_ptr<HttpTransport> transport);
  ChatResponse complete(const ChatRequest &request) override;

private:
  EndpointSettings settings_;
  std::shared_ptr<HttpTransport> transport_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff { 500 };
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff { 30000 };
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

// Shared cap on provider calls. max_calls < 0 means unlimited.
class CallBudget {
public:
  explicit CallBudget(long max_calls = -1) : remaining_(max_calls) { }
  // Throws Error(kBudgetExceeded) once the cap is reached.
  void consume();
  long used() const { return used_.load(); }

private:
  std::atomic<long> remaining_;
  std::atomic<long> used_ { 0 };
};

// Token bucket; rate <= 0 disables limiting.
class RateLimiter {
public:
  RateLimiter(double per_second, double burst);
  void acquire();

private:
  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// Adds budget, rate limiting and retries around another client. Each attempt
// consumes budget. Retryable errors back off exponentially; others and the
// final failure propagate.
class ResilientChatClient: public ChatClient {
public:
  ResilientChatClient(std::shared_ptr<ChatClient> inner, RetryPolicy policy,
                      std::shared_ptr<CallBudget> budget,
                      std::shared_ptr<RateLimiter> limiter = nullptr,
                      Sleeper sleeper = real_sleeper());
  ChatResponse complete(const ChatRequest &request) override;
  int retries() const { return retries_.load(); }

private:
  std::shared_ptr<ChatClient> inner_;
  RetryPolicy policy_;
  std::shared_ptr<CallBudget> budget_;
  std::shared_ptr<RateLimiter> limiter_;
  Sleeper sleeper_;
  std::atomic<int> retries_ { 0 };
};

}  // namespace chemreason

#endif  // CHEMREASON_PIPELINE_PROVIDERS_H_
