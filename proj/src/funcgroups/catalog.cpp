#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "chemreason/error.h"
#include "chemreason/funcgroups.h"

namespace chemreason {
namespace {

constexpr std::string_view kDefaultCatalog =
    "# Functional group catalog, v1.\n"
    "# name<TAB>pattern\n"
    "hydroxyl\t[OX2H1][CX4,c]\n"
    "carbonyl\t[CX3]=[OX1]\n"
    "aldehyde\t[CX3H1](=O)[#6]\n"
    "ketone\t[#6][CX3](=O)[#6]\n"
    "carboxylic_acid\t[CX3](=O)[OX2H1]\n"
    "ester\t[#6][CX3](=O)[OX2H0][#6]\n"
    "amide\t[CX3](=O)[NX3]\n"
    "imide\t[CX3](=O)[NX3][CX3]=O\n"
    "amine_primary\t[NX3H2][CX4,c]\n"
    "amine_secondary\t[CX4,c][NX3H1][CX4,c]\n"
    "amine_tertiary\t[CX4,c][NX3H0]([CX4,c])[CX4,c]\n"
    "ether\t[CX4,c][OX2H0][CX4,c]\n"
    "alkene\tC=C\n"
    "alkyne\tC#C\n"
    "halide\t[#6][F,Cl,Br,I]\n"
    "nitrile\t[CX2]#[NX1]\n"
    "nitro\t[NX3+](=O)[O-]\n"
    "arene\tc1ccccc1\n"
    "thiol\t[SX2H1][#6]\n"
    "sulfone\t[#6][SX4](=O)(=O)[#6]\n";

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

Catalog::Catalog(std::vector<Pattern> patterns) : patterns_(std::move(patterns)) {
  if (patterns_.empty())
    throw Error(ErrorCode::kConfigError, "functional group catalog is empty");
  std::set<std::string> names;
  for (const Pattern &p: patterns_) {
    if (!names.insert(p.name()).second)
      throw Error(ErrorCode::kConfigError,
                  fmt::format("duplicate group name '{}'", p.name()));
  }
}

Catalog Catalog::parse(std::string_view text) {
  std::vector<Pattern> patterns;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view {}
                                        : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#')
      continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::kConfigError,
                  fmt::format("catalog line {}: expected name<TAB>pattern",
                              line_no));
    std::string_view name = trim(line.substr(0, tab));
    std::string_view pattern = trim(line.substr(tab + 1));
    if (name.empty() || pattern.empty())
      throw Error(ErrorCode::kConfigError,
                  fmt::format("catalog line {}: empty field", line_no));
    try {
      patterns.push_back(Pattern::parse(std::string(name), pattern));
    } catch (const Error &e) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("catalog line {}: {}", line_no, e.what()));
    }
  }
  return Catalog(std::move(patterns));
}

Catalog Catalog::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kConfigError,
                fmt::format("cannot open catalog '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string_view default_catalog_text() {
  return kDefaultCatalog;
}

const Catalog &default_catalog() {
  static const Catalog catalog = Catalog::parse(kDefaultCatalog);
  return catalog;
}

std::vector<std::string> detect_functional_groups(const MolGraph &mol,
                                                  const Catalog &catalog) {
  std::set<std::string> names;
  for (const Pattern &p: catalog.patterns()) {
    if (has_substructure(mol, p))
      names.insert(p.name());
  }
  return { names.begin(), names.end() };
}

}  // namespace chemreason
