#ifndef CHEMREASON_FUNCGROUPS_H_
#define CHEMREASON_FUNCGROUPS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreason/molgraph.h"

namespace chemreason {

// One alternative of a query atom; unset fields match anything, except that
// without an element only heavy atoms match.
struct AtomConstraint {
  std::optional<int> element;
  std::optional<bool> aromatic;
  std::optional<int> total_h;
  std::optional<int> degree;
  std::optional<int> connectivity;  // degree + total H
  std::optional<int> charge;

  bool matches(const MolGraph &mol, int atom) const;
};

struct QueryAtom {
  std::vector<AtomConstraint> alternatives;  // OR; never empty

  bool matches(const MolGraph &mol, int atom) const;
};

enum class QueryBondKind {
  kSingleOrAromatic,  // unwritten bond
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
  kAny,
};

struct QueryBond {
  int begin = 0;
  int end = 0;
  QueryBondKind kind = QueryBondKind::kSingleOrAromatic;

  bool matches(BondOrder order) const;
};

// Substructure query written in a small SMILES-like pattern language:
//
//   C c N n ...   organic-subset atoms; uppercase aliphatic, lowercase aromatic
//   *             any heavy atom
//   [...]         bracket atom: element symbol, #n, *, Hn, Dn, Xn, +n / -n,
//                 with ',' separating alternatives
//   - = # : ~     bonds (~ any); unwritten bonds match single or aromatic
//   ( ) 1-9       branches and ring closures
//   .             separates parts; parses, but the pattern is then rejected
//
// Charge, hydrogen count and degree are unconstrained unless stated.
class Pattern {
public:
  // Throws ParseError on malformed text; Error(kInvalidSpec) if disconnected.
  static Pattern parse(std::string name, std::string_view text);

  const std::string &name() const { return name_; }
  const std::string &text() const { return text_; }
  const std::vector<QueryAtom> &atoms() const { return atoms_; }
  const std::vector<QueryBond> &bonds() const { return bonds_; }
  int num_atoms() const { return static_cast<int>(atoms_.size()); }

private:
  std::string name_;
  std::string text_;
  std::vector<QueryAtom> atoms_;
  std::vector<QueryBond> bonds_;
};

// Mappings from pattern atom index to target atom index. Mappings covering
// the same target atom set are reported once (the lexicographically smallest).
std::vector<std::vector<int>> match_substructure(const MolGraph &target,
                                                 const Pattern &query);

bool has_substructure(const MolGraph &target, const Pattern &query);

class Catalog {
public:
  // Throws Error(kConfigError) on empty catalogs or duplicate names.
  explicit Catalog(std::vector<Pattern> patterns);

  // Line format: name<TAB>pattern; blank lines and '#' comments skipped.
  static Catalog parse(std::string_view text);
  static Catalog load(const std::string &path);

  const std::vector<Pattern> &patterns() const { return patterns_; }

private:
  std::vector<Pattern> patterns_;
};

// The shipped catalog (same content as data/functional_groups.tsv).
const Catalog &default_catalog();
std::string_view default_catalog_text();

// Names of all matching groups, sorted and unique.
std::vector<std::string> detect_functional_groups(
    const MolGraph &mol, const Catalog &catalog = default_catalog());

}  // namespace chemreason

#endif  // CHEMREASON_FUNCGROUPS_H_
