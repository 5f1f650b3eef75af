#ifndef CHEMREASON_FINGERPRINT_H_
#define CHEMREASON_FINGERPRINT_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "chemreason/molgraph.h"

namespace chemreason {

struct FingerprintParams {
  int radius = 2;
  int width = 2048;

  // Throws Error(kInvalidParams) unless 0 <= radius <= 8 and width is a power
  // of two >= 64.
  void validate() const;
};

class Fingerprint {
public:
  explicit Fingerprint(int width = 2048);

  int width() const { return width_; }
  int set_count() const { return set_count_; }
  bool test(int bit) const { return (words_[bit >> 6] >> (bit & 63)) & 1u; }
  void set(int bit);

  std::span<const std::uint64_t> words() const { return words_; }
  std::vector<int> on_bits() const;

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;

private:
  int width_;
  int set_count_ = 0;
  std::vector<std::uint64_t> words_;
};

// 64-bit FNV-1a over the little-endian bytes of each value.
std::uint64_t fnv1a64(std::span<const std::int64_t> values);
std::uint64_t fnv1a64(std::initializer_list<std::int64_t> values);

// Circular-environment fingerprint. Radius-0 identifiers hash (Z, degree,
// total H, charge, isotope, ring flag, aromatic flag); each further iteration
// hashes (iteration, previous id, (bond order, neighbor id) pairs sorted with
// ids compared as unsigned).
// Every identifier at every radius sets bit id % width. Stereo is ignored.
Fingerprint morgan_fingerprint(const MolGraph &mol,
                               const FingerprintParams &params = {});

// Popcounts behind c / (a + b - c).
struct TanimotoCounts {
  int common = 0;
  int a = 0;
  int b = 0;

  double value() const;
  // Exactly 1, decided on the integer counts.
  bool exact() const { return common == a && common == b; }
};

// Throws Error(kWidthMismatch).
TanimotoCounts tanimoto_counts(const Fingerprint &a, const Fingerprint &b);

// Two empty fingerprints have similarity 1.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

}  // namespace chemreason

#endif  // CHEMREASON_FINGERPRINT_H_
