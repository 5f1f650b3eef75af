#ifndef CHEMREASON_PIPELINE_NAMELOOKUP_H_
#define CHEMREASON_PIPELINE_NAMELOOKUP_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "chemreason/pipeline/providers.h"

namespace chemreason {

// Maps a canonical SMILES to a preferred IUPAC name. nullopt is a clean miss;
// Error(kServiceUnavailable) means the service could not answer.
class NameLookupClient {
public:
  virtual ~NameLookupClient() = default;
  virtual std::optional<std::string> lookup(const std::string &canonical_smiles) = 0;
};

// GET {base}/compound/smiles/{smiles}/property/IUPACName/JSON, name at
// PropertyTable.Properties[0].IUPACName. 404 is a miss. Transport errors,
// 429/5xx and malformed bodies are retried, then reported unavailable.
class HttpNameLookup: public NameLookupClient {
public:
  HttpNameLookup(std::string base_url, std::shared_ptr<HttpTransport> transport,
                 RetryPolicy policy = {}, Sleeper sleeper = real_sleeper());
  std::optional<std::string> lookup(const std::string &canonical_smiles) override;

private:
  std::string base_url_;
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

// Fixed table loaded from JSON lines {"smiles": ..., "iupac": name|null}.
// Keys are canonicalized on load.
class FixtureNameLookup: public NameLookupClient {
public:
  static FixtureNameLookup load(const std::string &path);
  void add(const std::string &smiles, std::optional<std::string> name);
  std::optional<std::string> lookup(const std::string &canonical_smiles) override;

private:
  std::map<std::string, std::optional<std::string>> names_;
};

// Remembers answers (misses included) of another client, optionally
// persisting them as JSON lines that FixtureNameLookup can read back.
class CachedNameLookup: public NameLookupClient {
public:
  explicit CachedNameLookup(std::shared_ptr<NameLookupClient> inner,
                            std::string cache_path = {});
  std::optional<std::string> lookup(const std::string &canonical_smiles) override;
  int misses_forwarded() const { return forwarded_; }

private:
  std::shared_ptr<NameLookupClient> inner_;
  std::string cache_path_;
  std::mutex mu_;
  std::map<std::string, std::optional<std::string>> cache_;
  int forwarded_ = 0;
};

// Canonicalizes `smiles` and asks the client. Throws ParseError if the SMILES
// does not parse.
std::optional<std::string> fetch_iupac(const std::string &smiles,
                                       NameLookupClient &client);

}  // namespace chemreason

#endif  // CHEMREASON_PIPELINE_NAMELOOKUP_H_
