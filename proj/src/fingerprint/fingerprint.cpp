#include "chemreason/fingerprint.h"

#include <algorithm>
#include <bit>
#include <utility>

#include <fmt/format.h>

#include "chemreason/error.h"

namespace chemreason {

void FingerprintParams::validate() const {
  if (radius < 0 || radius > 8)
    throw Error(ErrorCode::kInvalidParams,
                fmt::format("radius {} outside [0, 8]", radius));
  if (width < 64 || !std::has_single_bit(static_cast<unsigned>(width)))
    throw Error(ErrorCode::kInvalidParams,
                fmt::format("width {} is not a power of two >= 64", width));
}

Fingerprint::Fingerprint(int width)
    : width_(width), words_((width + 63) / 64, 0) { }

void Fingerprint::set(int bit) {
  std::uint64_t &w = words_[bit >> 6];
  const std::uint64_t mask = std::uint64_t { 1 } << (bit & 63);
  if (!(w & mask)) {
    w |= mask;
    ++set_count_;
  }
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> out;
  for (int i = 0; i < width_; ++i) {
    if (test(i))
      out.push_back(i);
  }
  return out;
}

std::uint64_t fnv1a64(std::span<const std::int64_t> values) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::int64_t v: values) {
    auto u = static_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      h ^= (u >> (8 * k)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::uint64_t fnv1a64(std::initializer_list<std::int64_t> values) {
  return fnv1a64(std::span<const std::int64_t>(values.begin(), values.size()));
}

Fingerprint morgan_fingerprint(const MolGraph &mol,
                               const FingerprintParams &params) {
  params.validate();
  Fingerprint fp(params.width);
  const int n = mol.num_atoms();
  const auto width = static_cast<std::uint64_t>(params.width);

  std::vector<std::uint64_t> ids(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    ids[i] = fnv1a64({ a.element, mol.degree(i), mol.total_h(i), a.charge,
                       a.isotope, mol.in_ring(i) ? 1 : 0, a.aromatic ? 1 : 0 });
    fp.set(static_cast<int>(ids[i] % width));
  }

  std::vector<std::uint64_t> next(n);
  std::vector<std::pair<int, std::uint64_t>> env;
  std::vector<std::int64_t> buf;
  for (int r = 1; r <= params.radius; ++r) {
    for (int i = 0; i < n; ++i) {
      env.clear();
      for (const Neighbor &nb: mol.neighbors(i)) {
        env.emplace_back(static_cast<int>(mol.bond(nb.bond).order),
                         ids[nb.atom]);
      }
      std::sort(env.begin(), env.end());
      buf.assign({ r, static_cast<std::int64_t>(ids[i]) });
      for (auto [order, id]: env) {
        buf.push_back(order);
        buf.push_back(static_cast<std::int64_t>(id));
      }
      next[i] = fnv1a64(buf);
      fp.set(static_cast<int>(next[i] % width));
    }
    ids.swap(next);
  }
  return fp;
}

double TanimotoCounts::value() const {
  const int denom = a + b - common;
  if (denom == 0)
    return 1.0;
  return static_cast<double>(common) / static_cast<double>(denom);
}

TanimotoCounts tanimoto_counts(const Fingerprint &a, const Fingerprint &b) {
  if (a.width() != b.width())
    throw Error(ErrorCode::kWidthMismatch,
                fmt::format("fingerprint widths differ: {} vs {}", a.width(),
                            b.width()));
  TanimotoCounts t;
  t.a = a.set_count();
  t.b = b.set_count();
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i)
    t.common += std::popcount(wa[i] & wb[i]);
  return t;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  return tanimoto_counts(a, b).value();
}

}  // namespace chemreason
