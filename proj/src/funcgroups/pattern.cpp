#include <cctype>
#include <map>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "chemreason/element.h"
#include "chemreason/error.h"
#include "chemreason/funcgroups.h"

namespace chemreason {

bool AtomConstraint::matches(const MolGraph &mol, int atom) const {
  const Atom &a = mol.atom(atom);
  if (element ? a.element != *element : a.element == 1)
    return false;
  if (aromatic && a.aromatic != *aromatic)
    return false;
  if (total_h && mol.total_h(atom) != *total_h)
    return false;
  if (degree && mol.degree(atom) != *degree)
    return false;
  if (connectivity && mol.degree(atom) + mol.total_h(atom) != *connectivity)
    return false;
  if (charge && a.charge != *charge)
    return false;
  return true;
}

bool QueryAtom::matches(const MolGraph &mol, int atom) const {
  for (const AtomConstraint &c: alternatives) {
    if (c.matches(mol, atom))
      return true;
  }
  return false;
}

bool QueryBond::matches(BondOrder order) const {
  switch (kind) {
  case QueryBondKind::kSingleOrAromatic:
    return order == BondOrder::kSingle || order == BondOrder::kAromatic;
  case QueryBondKind::kSingle: return order == BondOrder::kSingle;
  case QueryBondKind::kDouble: return order == BondOrder::kDouble;
  case QueryBondKind::kTriple: return order == BondOrder::kTriple;
  case QueryBondKind::kAromatic: return order == BondOrder::kAromatic;
  case QueryBondKind::kAny: return true;
  }
  return false;
}

namespace {

class PatternReader {
public:
  explicit PatternReader(std::string_view text) : text_(text) { }

  void run(std::vector<QueryAtom> &atoms, std::vector<QueryBond> &bonds) {
    if (text_.empty())
      throw ParseError(ErrorCode::kEmptyInput, 0, "empty pattern");
    std::vector<int> branch_stack;
    std::map<int, std::pair<int, std::optional<QueryBondKind>>> rings;
    int prev = -1;
    std::optional<QueryBondKind> pending;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0)
          fail(ErrorCode::kUnbalancedBranch, "branch before any atom");
        branch_stack.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branch_stack.empty())
          fail(ErrorCode::kUnbalancedBranch, "unmatched ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
      } else if (c == '.') {
        // Accepted so that the connectivity check below can report it.
        if (prev < 0 || pending || !branch_stack.empty())
          fail(ErrorCode::kUnknownSymbol, "misplaced '.'");
        prev = -1;
        ++pos_;
      } else if (auto kind = bond_kind(c)) {
        if (pending)
          fail(ErrorCode::kInvalidBond, "two consecutive bond symbols");
        pending = kind;
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        if (prev < 0)
          fail(ErrorCode::kUnclosedRing, "ring digit before any atom");
        const int d = c - '0';
        auto it = rings.find(d);
        if (it == rings.end()) {
          rings[d] = { prev, pending };
        } else {
          auto [other, kind] = it->second;
          if (pending && kind && *pending != *kind)
            fail(ErrorCode::kInvalidBond, "conflicting ring-closure bonds");
          add_bond(bonds, other, prev, pending ? pending : kind);
          rings.erase(it);
        }
        pending.reset();
        ++pos_;
      } else {
        const int idx = static_cast<int>(atoms.size());
        atoms.push_back(read_atom());
        if (prev >= 0)
          add_bond(bonds, prev, idx, pending);
        else if (pending)
          fail(ErrorCode::kInvalidBond, "bond before first atom");
        pending.reset();
        prev = idx;
      }
    }
    if (!branch_stack.empty())
      fail(ErrorCode::kUnbalancedBranch, "unclosed '('");
    if (!rings.empty())
      fail(ErrorCode::kUnclosedRing,
           fmt::format("ring {} never closed", rings.begin()->first));
    if (pending)
      fail(ErrorCode::kInvalidBond, "dangling bond symbol");
  }

private:
  [[noreturn]] void fail(ErrorCode code, const std::string &msg) const {
    throw ParseError(code, pos_,
                     fmt::format("{} at position {} in pattern '{}'", msg,
                                 pos_, text_));
  }

  static std::optional<QueryBondKind> bond_kind(char c) {
    switch (c) {
    case '-': return QueryBondKind::kSingle;
    case '=': return QueryBondKind::kDouble;
    case '#': return QueryBondKind::kTriple;
    case ':': return QueryBondKind::kAromatic;
    case '~': return QueryBondKind::kAny;
    default: return std::nullopt;
    }
  }

  void add_bond(std::vector<QueryBond> &bonds, int a, int b,
                std::optional<QueryBondKind> kind) const {
    if (a == b)
      fail(ErrorCode::kInvalidBond, "atom bonded to itself");
    for (const QueryBond &q: bonds) {
      if ((q.begin == a && q.end == b) || (q.begin == b && q.end == a))
        fail(ErrorCode::kInvalidBond, "duplicate bond");
    }
    bonds.push_back({ a, b, kind.value_or(QueryBondKind::kSingleOrAromatic) });
  }

  // Element symbol at pos_; lowercase means aromatic. Two-letter symbols are
  // tried first. Returns false if nothing recognizable is there.
  bool read_element(AtomConstraint &c, bool bracket) {
    auto try_symbol = [&](std::string_view sym, bool aromatic) {
      std::string proper(sym);
      proper[0] = static_cast<char>(std::toupper(proper[0]));
      auto z = atomic_number_from_symbol(proper);
      if (!z)
        return false;
      if (aromatic && !may_be_aromatic(*z))
        return false;
      if (!bracket && !is_organic_subset(*z))
        return false;
      c.element = *z;
      c.aromatic = aromatic;
      pos_ += sym.size();
      return true;
    };
    const char c0 = text_[pos_];
    const char c1 = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    const bool lower = std::islower(static_cast<unsigned char>(c0));
    if (std::isalpha(static_cast<unsigned char>(c1))
        && std::islower(static_cast<unsigned char>(c1))) {
      // "Cl", "Br" (aliphatic) or "se", "as" (aromatic).
      if (!lower && try_symbol(text_.substr(pos_, 2), false))
        return true;
      if (lower && bracket && try_symbol(text_.substr(pos_, 2), true))
        return true;
    }
    if (!std::isalpha(static_cast<unsigned char>(c0)))
      return false;
    return try_symbol(text_.substr(pos_, 1), lower);
  }

  int read_number(int fallback) {
    const std::size_t start = pos_;
    int v = 0;
    while (pos_ < text_.size()
           && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 999)
        fail(ErrorCode::kMalformedBracketAtom, "number too large");
      ++pos_;
    }
    return pos_ == start ? fallback : v;
  }

  QueryAtom read_atom() {
    QueryAtom q;
    const char c = text_[pos_];
    if (c == '*') {
      ++pos_;
      q.alternatives.emplace_back();
      return q;
    }
    if (c != '[') {
      AtomConstraint a;
      if (!read_element(a, false))
        fail(ErrorCode::kUnknownSymbol,
             fmt::format("unexpected character '{}'", c));
      q.alternatives.push_back(a);
      return q;
    }
    const std::size_t open = pos_++;
    AtomConstraint cur;
    bool any_primitive = false;
    while (true) {
      if (pos_ >= text_.size()) {
        pos_ = open;
        fail(ErrorCode::kMalformedBracketAtom, "unterminated bracket atom");
      }
      const char d = text_[pos_];
      if (d == ']' || d == ',') {
        if (!any_primitive)
          fail(ErrorCode::kMalformedBracketAtom, "empty alternative");
        q.alternatives.push_back(cur);
        cur = {};
        any_primitive = false;
        ++pos_;
        if (d == ']')
          break;
        continue;
      }
      any_primitive = true;
      if (d == '*') {
        ++pos_;
      } else if (d == '#') {
        ++pos_;
        const int z = read_number(-1);
        if (z < 1 || z > kMaxAtomicNumber)
          fail(ErrorCode::kMalformedBracketAtom, "bad atomic number");
        cur.element = z;
      } else if (d == 'H') {
        ++pos_;
        cur.total_h = read_number(1);
      } else if (d == 'D') {
        ++pos_;
        cur.degree = read_number(1);
      } else if (d == 'X') {
        ++pos_;
        cur.connectivity = read_number(1);
      } else if (d == '+' || d == '-') {
        ++pos_;
        const int sign = d == '+' ? 1 : -1;
        int mag = read_number(0);
        if (mag == 0) {
          mag = 1;
          while (pos_ < text_.size() && text_[pos_] == d) {
            ++mag;
            ++pos_;
          }
        }
        cur.charge = sign * mag;
      } else if (!read_element(cur, true)) {
        fail(ErrorCode::kMalformedBracketAtom,
             fmt::format("unexpected '{}' in bracket atom", d));
      }
    }
    return q;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Pattern Pattern::parse(std::string name, std::string_view text) {
  Pattern p;
  p.name_ = std::move(name);
  p.text_ = std::string(text);
  PatternReader(text).run(p.atoms_, p.bonds_);

  // Connectivity check.
  const int n = p.num_atoms();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  int groups = n;
  for (const QueryBond &b: p.bonds_) {
    const int x = find(b.begin), y = find(b.end);
    if (x != y) {
      parent[x] = y;
      --groups;
    }
  }
  if (groups != 1)
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("pattern '{}' is not connected", p.name_));
  return p;
}

}  // namespace chemreason
