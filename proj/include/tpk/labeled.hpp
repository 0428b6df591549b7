#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpk/formula.hpp"

namespace tpk {

using Label = std::string;

struct RelAtom {
  Label from, to;  // R from to
  bool operator==(const RelAtom& o) const { return from == o.from && to == o.to; }
  auto operator<=>(const RelAtom& o) const = default;
};

struct LabFml {
  Label lab;
  Formula fml;
  bool operator==(const LabFml& o) const { return lab == o.lab && fml == o.fml; }
  bool operator<(const LabFml& o) const {
    if (lab != o.lab) return lab < o.lab;
    return fml < o.fml;
  }
};

// A labeled sequent R, G => D: a set of relational atoms plus two multisets of
// labeled formulas. Multisets are kept as sorted vectors.
struct LabeledSequent {
  std::set<RelAtom> rel;
  std::vector<LabFml> ante, succ;  // sorted

  static LabeledSequent empty() { return {}; }

  void addRel(const Label& a, const Label& b) { rel.insert({a, b}); }
  void addAnte(const Label& w, const Formula& f);
  void addSucc(const Label& w, const Formula& f);
  // Removes one occurrence; returns false if absent.
  bool removeAnte(const Label& w, const Formula& f);
  bool removeSucc(const Label& w, const Formula& f);
  int countAnte(const Label& w, const Formula& f) const;
  int countSucc(const Label& w, const Formula& f) const;

  int length() const { return int(rel.size() + ante.size() + succ.size()); }
  bool isEmpty() const { return rel.empty() && ante.empty() && succ.empty(); }

  std::set<Label> labels() const;
  std::set<Label> formulaLabels() const;

  bool operator==(const LabeledSequent& o) const { return rel == o.rel && ante == o.ante && succ == o.succ; }
  bool operator!=(const LabeledSequent& o) const { return !(*this == o); }
  bool operator<(const LabeledSequent& o) const;

  std::string str() const;
};

// Sequent composition: union of relational atoms, multiset sum of both sides.
LabeledSequent compose(const LabeledSequent& a, const LabeledSequent& b);

// Label substitution (by/replace): rewrites every occurrence of `replace` to `by`.
LabeledSequent labelSubstitute(const LabeledSequent& s, const Label& replace, const Label& by);
// Simultaneous renaming; labels not in the map stay put.
LabeledSequent renameLabels(const LabeledSequent& s, const std::map<Label, Label>& m);

// Graph of a labeled sequent: one node per label carrying its flat payload,
// one directed edge per relational atom.
struct SequentGraph {
  struct NodePayload {
    std::vector<Formula> ante, succ;
  };
  std::map<Label, NodePayload> nodes;
  std::vector<RelAtom> edges;
};

SequentGraph graphOf(const LabeledSequent& s);

struct PolytreeCheck {
  bool ok = false;
  std::string reason;  // set when !ok
};

// Labeled polytree sequent: (1) no relational atoms -> flat, (2) otherwise all
// formula labels occur in the relational atoms, (3) the underlying undirected
// graph is connected and acyclic. The empty sequent counts as flat.
PolytreeCheck polytreeCheck(const LabeledSequent& s);
bool isPolytree(const LabeledSequent& s);

// w-partition: s = a (x)_w b with both sides polytrees sharing exactly {w}.
// An empty side is accepted (the default partition puts everything left).
struct PartitionError {
  std::string reason;
};
std::optional<PartitionError> checkPartition(const LabeledSequent& s, const Label& w, const LabeledSequent& a,
                                             const LabeledSequent& b);

// Subpolytree sequent s|_u^w: the component containing u once the edge between
// w and u is removed. Requires Rwu or Ruw in s and s to be a polytree.
LabeledSequent subpolytree(const LabeledSequent& s, const Label& u, const Label& w);

// Isomorphism per the four clauses: a label bijection preserving relational
// atoms and labeled formulas on both sides.
std::optional<std::map<Label, Label>> isomorphism(const LabeledSequent& a, const LabeledSequent& b);
bool isomorphic(const LabeledSequent& a, const LabeledSequent& b);

// AHU-style canonical string for polytree sequents: equal strings iff
// isomorphic. Throws std::invalid_argument on non-polytree input.
std::string canonicalForm(const LabeledSequent& s);

// Canonical root: a center of the underlying tree, tie-broken by canonical
// subtree strings. Iso-invariant. Sequent must be a polytree.
Label canonicalRoot(const LabeledSequent& s);

}  // namespace tpk
