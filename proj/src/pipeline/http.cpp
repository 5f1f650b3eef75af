#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cctype>

#include <fmt/format.h>

#include "chemreason/pipeline/providers.h"

namespace chemreason {
namespace {

class HttplibTransport: public HttpTransport {
public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) { }

  HttpResponse get(const std::string &url, const HttpHeaders &headers) override {
    auto [client, path] = connect(url);
    auto res = client->Get(path, to_headers(headers));
    return unwrap(url, res);
  }

  HttpResponse post(const std::string &url, const HttpHeaders &headers,
                    const std::string &body,
                    const std::string &content_type) override {
    auto [client, path] = connect(url);
    auto res = client->Post(path, to_headers(headers), body, content_type);
    return unwrap(url, res);
  }

private:
  std::pair<std::unique_ptr<httplib::Client>, std::string> connect(
      const std::string &url) {
    const auto scheme_end = url.find("://");
    const auto path_start =
        url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string host = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    auto client = std::make_unique<httplib::Client>(host);
    client->set_connection_timeout(timeout_);
    client->set_read_timeout(timeout_);
    client->set_follow_location(true);
    return { std::move(client), path };
  }

  static httplib::Headers to_headers(const HttpHeaders &headers) {
    httplib::Headers h;
    for (const auto &[k, v]: headers)
      h.emplace(k, v);
    return h;
  }

  static HttpResponse unwrap(const std::string &url, const httplib::Result &res) {
    if (!res) {
      throw ProviderError(0, fmt::format("request to {} failed: {}", url,
                                         httplib::to_string(res.error())));
    }
    return { res->status, res->body };
  }

  std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

std::string url_encode(std::string_view text) {
  std::string out;
  for (unsigned char c: text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~')
      out.push_back(static_cast<char>(c));
    else
      out += fmt::format("%{:02X}", c);
  }
  return out;
}

}  // namespace chemreason
