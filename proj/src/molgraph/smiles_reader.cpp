#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "chemreason/element.h"
#include "chemreason/error.h"
#include "chemreason/molgraph.h"
#include "chemreason/smiles.h"

namespace chemreason {
namespace {

constexpr int kRingPlaceholder = -2;
constexpr int kHydrogenSlot = -1;

struct RawBond {
  int begin;
  int end;
  BondOrder order;
  bool implicit_aromatic;
  char direction;  // 0, '/' or '\\'
  int written_first;
};

struct OpenRing {
  int atom;
  char symbol;
  std::size_t slot;  // index into the atom's written neighbor order
  std::size_t position;
};

bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':' || c == '/'
         || c == '\\';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// Bridges of the raw bond list; non-bridges are ring bonds.
std::vector<bool> ring_bond_flags(int n, const std::vector<RawBond> &bonds) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (int i = 0; i < static_cast<int>(bonds.size()); ++i) {
    adj[bonds[i].begin].push_back({ bonds[i].end, i });
    adj[bonds[i].end].push_back({ bonds[i].begin, i });
  }
  std::vector<bool> ring(bonds.size(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  auto dfs = [&](auto &&self, int u, int parent_bond) -> void {
    disc[u] = low[u] = timer++;
    for (auto [v, b]: adj[u]) {
      if (b == parent_bond)
        continue;
      if (disc[v] >= 0) {
        low[u] = std::min(low[u], disc[v]);
        continue;
      }
      self(self, v, b);
      low[u] = std::min(low[u], low[v]);
      if (low[v] > disc[u])
        ring[b] = false;
    }
  };
  for (int i = 0; i < n; ++i) {
    if (disc[i] < 0)
      dfs(dfs, i, -1);
  }
  return ring;
}

class SmilesReader {
public:
  explicit SmilesReader(std::string_view text): text_(text) { }

  MolGraph read();

private:
  [[noreturn]] void fail(ErrorCode code, std::size_t pos,
                         const std::string &msg) const {
    throw ParseError(code, pos, fmt::format("{} at position {}", msg, pos));
  }

  void read_organic_atom();
  void read_bracket_atom();
  void read_ring_closure();
  void add_atom(Atom atom, std::size_t pos);
  void add_bond(int from, int to, char symbol, std::size_t pos);
  std::vector<DoubleBondStereo> collect_double_bond_stereo() const;
  void resolve_chirality();

  std::string_view text_;
  std::size_t pos_ = 0;

  std::vector<Atom> atoms_;
  std::vector<RawBond> bonds_;
  std::vector<std::vector<int>> written_order_;
  std::vector<bool> has_preceding_;
  std::vector<char> chiral_symbol_;  // 0, '@' (one) or 'A' (@@)

  int prev_ = -1;
  char pending_bond_ = 0;
  std::size_t pending_pos_ = 0;
  std::vector<int> branches_;
  std::map<int, OpenRing> open_rings_;
};

MolGraph SmilesReader::read() {
  if (text_.empty())
    fail(ErrorCode::kEmptyInput, 0, "empty SMILES");

  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (c == '[') {
      read_bracket_atom();
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      read_organic_atom();
    } else if (is_bond_char(c)) {
      if (pending_bond_ != 0)
        fail(ErrorCode::kInvalidBond, pos_, "consecutive bond symbols");
      if (prev_ < 0)
        fail(ErrorCode::kInvalidBond, pos_, "bond symbol without atom");
      pending_bond_ = c;
      pending_pos_ = pos_;
      ++pos_;
    } else if (c == '(') {
      if (prev_ < 0)
        fail(ErrorCode::kUnbalancedBranch, pos_, "branch without atom");
      if (pos_ > 0 && text_[pos_ - 1] == '(')
        fail(ErrorCode::kUnbalancedBranch, pos_, "branch opens with '('");
      if (pending_bond_ != 0)
        fail(ErrorCode::kInvalidBond, pending_pos_, "bond symbol before '('");
      branches_.push_back(prev_);
      ++pos_;
    } else if (c == ')') {
      if (branches_.empty())
        fail(ErrorCode::kUnbalancedBranch, pos_, "unmatched ')'");
      if (pending_bond_ != 0)
        fail(ErrorCode::kInvalidBond, pending_pos_, "dangling bond symbol");
      if (pos_ > 0 && text_[pos_ - 1] == '(')
        fail(ErrorCode::kUnbalancedBranch, pos_, "empty branch");
      prev_ = branches_.back();
      branches_.pop_back();
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      read_ring_closure();
    } else if (c == '.') {
      if (pending_bond_ != 0)
        fail(ErrorCode::kInvalidBond, pending_pos_, "dangling bond symbol");
      if (!branches_.empty())
        fail(ErrorCode::kUnbalancedBranch, pos_, "'.' inside a branch");
      if (prev_ < 0)
        fail(ErrorCode::kEmptyInput, pos_, "empty fragment");
      prev_ = -1;
      ++pos_;
      if (pos_ == text_.size())
        fail(ErrorCode::kEmptyInput, pos_, "empty fragment");
    } else {
      fail(ErrorCode::kUnknownSymbol, pos_,
           fmt::format("unexpected character '{}'", c));
    }
  }

  if (pending_bond_ != 0)
    fail(ErrorCode::kInvalidBond, pending_pos_, "dangling bond symbol");
  if (!branches_.empty())
    fail(ErrorCode::kUnbalancedBranch, text_.size(), "unclosed '('");
  if (!open_rings_.empty()) {
    const auto &[digit, ring] = *open_rings_.begin();
    fail(ErrorCode::kUnclosedRing, ring.position,
         fmt::format("ring bond {} never closed", digit));
  }

  // Implicit bonds between aromatic atoms are aromatic only inside rings.
  std::vector<bool> in_ring =
      ring_bond_flags(static_cast<int>(atoms_.size()), bonds_);
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    if (bonds_[i].implicit_aromatic && !in_ring[i])
      bonds_[i].order = BondOrder::kSingle;
  }
  // Lowercase atoms outside any ring are rejected; this also keeps ordinary
  // words such as "on" from reading as molecules.
  std::vector<bool> ring_atom(atoms_.size(), false);
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    if (in_ring[i])
      ring_atom[bonds_[i].begin] = ring_atom[bonds_[i].end] = true;
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].aromatic && !ring_atom[i])
      fail(ErrorCode::kInvalidAromaticity, text_.size(),
           fmt::format("aromatic atom {} is not in a ring", i));
  }

  resolve_chirality();
  std::vector<DoubleBondStereo> stereo = collect_double_bond_stereo();

  std::vector<Bond> bonds;
  bonds.reserve(bonds_.size());
  for (const RawBond &b: bonds_)
    bonds.push_back({ b.begin, b.end, b.order });
  try {
    return MolGraph(std::move(atoms_), std::move(bonds), std::move(stereo));
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw ParseError(e.code(), text_.size(), e.what());
  }
}

void SmilesReader::read_organic_atom() {
  const std::size_t start = pos_;
  const char c = text_[pos_];
  Atom atom;
  auto next_is = [&](char x) {
    return pos_ + 1 < text_.size() && text_[pos_ + 1] == x;
  };

  switch (c) {
  case 'B':
    if (next_is('r')) {
      atom.element = 35;
      ++pos_;
    } else {
      atom.element = 5;
    }
    break;
  case 'C':
    if (next_is('l')) {
      atom.element = 17;
      ++pos_;
    } else {
      atom.element = 6;
    }
    break;
  case 'N':
    atom.element = 7;
    break;
  case 'O':
    atom.element = 8;
    break;
  case 'P':
    atom.element = 15;
    break;
  case 'S':
    atom.element = 16;
    break;
  case 'F':
    atom.element = 9;
    break;
  case 'I':
    atom.element = 53;
    break;
  case 'b':
  case 'c':
  case 'n':
  case 'o':
  case 'p':
  case 's':
    atom.element = *atomic_number_from_symbol(
        std::string(1, static_cast<char>(std::toupper(c))));
    atom.aromatic = true;
    break;
  default:
    fail(ErrorCode::kUnknownSymbol, pos_,
         fmt::format("unknown atom symbol '{}'", c));
  }
  ++pos_;
  add_atom(atom, start);
}

void SmilesReader::read_bracket_atom() {
  const std::size_t start = pos_;
  ++pos_;
  auto at_end = [&] { return pos_ >= text_.size(); };
  auto peek = [&] { return at_end() ? '\0' : text_[pos_]; };
  auto malformed = [&](const std::string &msg) {
    fail(ErrorCode::kMalformedBracketAtom, start, msg);
  };
  auto read_number = [&]() -> std::optional<int> {
    std::size_t begin = pos_;
    int value = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      value = value * 10 + (peek() - '0');
      if (value > 100000)
        malformed("number too large");
      ++pos_;
    }
    if (pos_ == begin)
      return std::nullopt;
    return value;
  };

  Atom atom;
  atom.explicit_h = 0;
  if (auto iso = read_number())
    atom.isotope = *iso;

  if (at_end())
    malformed("unterminated bracket atom");
  const char c = peek();
  if (c == '*')
    malformed("wildcard atoms are not supported");
  if (std::islower(static_cast<unsigned char>(c))) {
    std::string_view rest = text_.substr(pos_);
    if (rest.starts_with("se") || rest.starts_with("as")) {
      atom.element = rest.starts_with("se") ? 34 : 33;
      pos_ += 2;
    } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p'
               || c == 's') {
      atom.element = *atomic_number_from_symbol(
          std::string(1, static_cast<char>(std::toupper(c))));
      ++pos_;
    } else {
      fail(ErrorCode::kUnknownSymbol, pos_,
           fmt::format("unknown aromatic symbol '{}'", c));
    }
    atom.aromatic = true;
  } else if (std::isupper(static_cast<unsigned char>(c))) {
    std::optional<int> z;
    if (pos_ + 1 < text_.size()
        && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
      z = atomic_number_from_symbol(text_.substr(pos_, 2));
      if (z)
        pos_ += 2;
    }
    if (!z) {
      z = atomic_number_from_symbol(text_.substr(pos_, 1));
      if (!z)
        fail(ErrorCode::kUnknownSymbol, pos_,
             fmt::format("unknown element '{}'", c));
      ++pos_;
    }
    atom.element = *z;
  } else {
    malformed("missing element symbol");
  }

  char chiral = 0;
  if (peek() == '@') {
    ++pos_;
    if (peek() == '@') {
      ++pos_;
      chiral = 'A';
    } else {
      chiral = '@';
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) && peek() != 'H')
      malformed("only @ and @@ chirality classes are supported");
  }

  if (peek() == 'H') {
    ++pos_;
    atom.explicit_h = read_number().value_or(1);
  }

  if (peek() == '+' || peek() == '-') {
    const char sign = peek();
    ++pos_;
    int magnitude = 1;
    if (auto n = read_number()) {
      magnitude = *n;
    } else {
      while (peek() == sign) {
        ++magnitude;
        ++pos_;
      }
    }
    if (magnitude > 15)
      malformed("charge out of range");
    atom.charge = sign == '+' ? magnitude : -magnitude;
  }

  if (peek() == ':') {
    ++pos_;
    auto cls = read_number();
    if (!cls)
      malformed("missing atom class");
    atom.atom_class = *cls;
  }

  if (peek() != ']')
    malformed(at_end() ? "unterminated bracket atom"
                       : fmt::format("unexpected '{}' in bracket atom", peek()));
  ++pos_;

  add_atom(atom, start);
  chiral_symbol_.back() = chiral;
}

void SmilesReader::read_ring_closure() {
  const std::size_t start = pos_;
  if (prev_ < 0)
    fail(ErrorCode::kInvalidBond, pos_, "ring bond without atom");

  int digit;
  if (text_[pos_] == '%') {
    if (pos_ + 2 >= text_.size()
        || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))
        || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
      fail(ErrorCode::kUnknownSymbol, pos_, "'%' must be followed by two digits");
    digit = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
    pos_ += 3;
  } else {
    digit = text_[pos_] - '0';
    ++pos_;
  }

  auto it = open_rings_.find(digit);
  if (it == open_rings_.end()) {
    open_rings_[digit] = OpenRing { prev_, pending_bond_,
                                    written_order_[prev_].size(), start };
    written_order_[prev_].push_back(kRingPlaceholder);
    pending_bond_ = 0;
    return;
  }

  const OpenRing ring = it->second;
  open_rings_.erase(it);
  if (ring.atom == prev_)
    fail(ErrorCode::kInvalidBond, start, "ring bond closes on its own atom");

  char symbol = ring.symbol;
  int from = ring.atom, to = prev_;
  if (pending_bond_ != 0) {
    const bool both_directional =
        (symbol == '/' || symbol == '\\')
        && (pending_bond_ == '/' || pending_bond_ == '\\');
    if (symbol != 0 && symbol != pending_bond_ && !both_directional)
      fail(ErrorCode::kInvalidBond, start, "conflicting ring bond symbols");
    if (symbol == 0) {
      symbol = pending_bond_;
      std::swap(from, to);
    }
  }
  pending_bond_ = 0;

  written_order_[ring.atom][ring.slot] = prev_;
  written_order_[prev_].push_back(ring.atom);
  add_bond(from, to, symbol, start);
}

void SmilesReader::add_atom(Atom atom, std::size_t pos) {
  const int idx = static_cast<int>(atoms_.size());
  atoms_.push_back(atom);
  written_order_.emplace_back();
  has_preceding_.push_back(prev_ >= 0);
  chiral_symbol_.push_back(0);

  if (prev_ >= 0) {
    written_order_[prev_].push_back(idx);
    written_order_[idx].push_back(prev_);
    add_bond(prev_, idx, pending_bond_, pos);
  }
  pending_bond_ = 0;
  prev_ = idx;
}

void SmilesReader::add_bond(int from, int to, char symbol, std::size_t pos) {
  RawBond b { from, to, BondOrder::kSingle, false, 0, from };
  switch (symbol) {
  case 0:
    if (atoms_[from].aromatic && atoms_[to].aromatic) {
      b.order = BondOrder::kAromatic;
      b.implicit_aromatic = true;
    }
    break;
  case '-':
    break;
  case '=':
    b.order = BondOrder::kDouble;
    break;
  case '#':
    b.order = BondOrder::kTriple;
    break;
  case ':':
    b.order = BondOrder::kAromatic;
    break;
  case '/':
  case '\\':
    b.direction = symbol;
    break;
  default:
    fail(ErrorCode::kUnknownSymbol, pos, "unknown bond symbol");
  }
  bonds_.push_back(b);
}

void SmilesReader::resolve_chirality() {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (chiral_symbol_[i] == 0)
      continue;
    Atom &atom = atoms_[i];
    std::vector<int> written = written_order_[i];
    const int h = atom.explicit_h.value_or(0);
    const int slots = static_cast<int>(written.size()) + h;
    if (h > 1 || !(slots == 4 || (slots == 3 && h == 0))) {
      atom.chirality = Chirality::kNone;
      continue;
    }
    const bool has_slot = h == 1 || written.size() == 3;
    if (has_slot) {
      written.insert(written.begin() + (has_preceding_[i] ? 1 : 0),
                     kHydrogenSlot);
    }
    std::vector<int> intrinsic = written;
    std::sort(intrinsic.begin(), intrinsic.end());

    const bool ccw = chiral_symbol_[i] == '@';
    const bool flip = permutation_parity(written, intrinsic) == 1;
    atom.chirality = (ccw != flip) ? Chirality::kCounterClockwise
                                   : Chirality::kClockwise;
  }
}

std::vector<DoubleBondStereo>
SmilesReader::collect_double_bond_stereo() const {
  // Position of `sub` relative to `center`: true = up.
  auto position = [&](const RawBond &b, int center) {
    const bool up = b.direction == '/';
    return b.written_first == center ? up : !up;
  };
  auto marked_side = [&](int center, int exclude) -> std::optional<int> {
    for (std::size_t i = 0; i < bonds_.size(); ++i) {
      const RawBond &b = bonds_[i];
      if (b.direction == 0)
        continue;
      if ((b.begin == center && b.end != exclude)
          || (b.end == center && b.begin != exclude))
        return static_cast<int>(i);
    }
    return std::nullopt;
  };

  std::vector<DoubleBondStereo> out;
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    const RawBond &db = bonds_[i];
    if (db.order != BondOrder::kDouble)
      continue;
    auto left = marked_side(db.begin, db.end);
    auto right = marked_side(db.end, db.begin);
    if (!left || !right)
      continue;
    const RawBond &lb = bonds_[*left];
    const RawBond &rb = bonds_[*right];
    const int ref_begin = lb.begin == db.begin ? lb.end : lb.begin;
    const int ref_end = rb.begin == db.end ? rb.end : rb.begin;
    const bool trans = position(lb, db.begin) != position(rb, db.end);
    out.push_back({ static_cast<int>(i), ref_begin, ref_end, trans });
  }
  return out;
}

}  // namespace

MolGraph parse_smiles(std::string_view text) {
  return SmilesReader(trim(text)).read();
}

std::vector<std::string> split_reaction_roles(std::string_view text) {
  text = trim(text);
  std::vector<std::string> roles(1);
  int depth = 0;
  for (char c: text) {
    if (c == '[')
      ++depth;
    else if (c == ']')
      --depth;
    if (c == '>' && depth == 0) {
      roles.emplace_back();
      continue;
    }
    roles.back().push_back(c);
  }
  if (roles.size() != 3)
    throw ParseError(ErrorCode::kWrongSeparatorCount, 0,
                     fmt::format("reaction SMILES needs exactly two '>', found {}",
                                 roles.size() - 1));
  return roles;
}

std::vector<std::string> split_fragments(std::string_view text) {
  std::vector<std::string> parts;
  if (text.empty())
    return parts;
  parts.emplace_back();
  int depth = 0;
  for (char c: text) {
    if (c == '[')
      ++depth;
    else if (c == ']')
      --depth;
    if (c == '.' && depth == 0) {
      parts.emplace_back();
      continue;
    }
    parts.back().push_back(c);
  }
  return parts;
}

bool looks_like_reaction(std::string_view text) {
  return text.find('>') != std::string_view::npos;
}

ReactionGraph parse_reaction(std::string_view text) {
  static constexpr std::string_view kRoles[] = { "reactants", "agents",
                                                 "products" };
  std::vector<std::string> roles = split_reaction_roles(text);
  ReactionGraph rxn;
  std::vector<MolGraph> *targets[] = { &rxn.reactants, &rxn.agents,
                                       &rxn.products };
  for (int r = 0; r < 3; ++r) {
    std::vector<std::string> members = split_fragments(roles[r]);
    for (std::size_t m = 0; m < members.size(); ++m) {
      try {
        targets[r]->push_back(parse_smiles(members[m]));
      } catch (const ParseError &e) {
        throw ParseError(e.code(), e.position(),
                         fmt::format("{}[{}]: {}", kRoles[r], m, e.what()));
      }
    }
  }
  return rxn;
}

}  // namespace chemreason
