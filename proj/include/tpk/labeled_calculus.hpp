#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpk/axiom.hpp"
#include "tpk/display_calculus.hpp"  // FmlPat
#include "tpk/labeled.hpp"

namespace tpk {

// ---- schematic labeled sequents -------------------------------------------
struct SchRel {
  std::string from, to;  // label variable names
  auto operator<=>(const SchRel&) const = default;
};

struct SchFml {
  std::string lab;
  FmlPat fml;
  bool inAnte = true;
};

// A labeled-sequent variable produced by phi, annotated with an atom and the
// label variable it was created at.
struct AnnVar {
  std::string name;
  std::string atom;
  std::string lab;
};

struct LabSeqPat {
  std::vector<SchRel> rel;
  std::vector<SchFml> fmls;
  std::vector<std::string> seqvars;  // plain and annotated variable names
};

// phi(A) or phi(Bj): the explicit blocks contributed by one side of an axiom.
struct PtComponent {
  std::vector<SchRel> rel;
  std::vector<std::string> annvars;    // names, in creation order
  std::set<std::string> labelVars;     // all label variables occurring
};

struct LabeledSubst {
  std::map<std::string, Label> labels;
  std::map<std::string, std::string> atoms;
  std::map<std::string, Formula> formulas;
  std::map<std::string, LabeledSequent> seqs;

  bool operator==(const LabeledSubst&) const = default;
};

struct LabVarSet {
  std::set<std::string> labels, atoms, formulas, seqs;
};

struct LabeledRule {
  std::string name;
  std::vector<LabSeqPat> premises;
  LabSeqPat conclusion;
  bool initial = false;
  // dagger: these label variables must be instantiated with labels fresh for
  // the instantiated conclusion. For pt rules this holds the P1 variables.
  std::vector<std::string> freshVars;

  bool isPt = false;
  int axiomIndex = -1;
  std::string rootVar;                  // the shared root of phi(A)/phi(Bj)
  PtComponent aPart;
  std::vector<PtComponent> bParts;      // one per premise
  std::map<std::string, AnnVar> annvars;
  std::string contextVar = "S";

  LabVarSet vars() const;
};

LabeledSequent instantiate(const LabSeqPat& p, const LabeledSubst& s);

// ---- calculus ---------------------------------------------------------------
struct LabeledRulePrint {
  std::string name;
  std::vector<std::string> premises;
  std::string conclusion;
  std::string sideConditions;
};

class LabeledCalculus {
public:
  explicit LabeledCalculus(const std::vector<PrimitiveAxiom>& axioms = {});

  const LabeledRule* find(const std::string& name) const;
  const std::vector<LabeledRule>& rules() const { return rules_; }
  const std::vector<PrimitiveAxiom>& axioms() const { return axioms_; }
  // Rules of the pt closure for one axiom (base rule first).
  std::vector<const LabeledRule*> ptClosure(int axiomIndex) const;

private:
  std::vector<LabeledRule> rules_;
  std::map<std::string, size_t> byName_;
  std::vector<PrimitiveAxiom> axioms_;
};

// phi translation of a primitive-sublanguage formula; allocates label
// variables and annotated variables via the supplied counters.
PtComponent phi(const Formula& f, const std::string& root, int& labelCounter, int& annCounter,
                std::map<std::string, AnnVar>& annvars);

// The pt rule of one simplified axiom (no contractions).
LabeledRule makeLabeledRule(const PrimitiveAxiom& ax, int index);
// The pt rule plus its contraction closure, deduplicated up to renaming.
std::vector<LabeledRule> makeLabeledRules(const PrimitiveAxiom& ax, int index);

std::string patternStr(const LabSeqPat& p, const LabeledRule& rule);
LabeledRulePrint printRule(const LabeledRule& r);

// ---- applying rules ---------------------------------------------------------
struct ApplyResult {
  bool ok = true;
  std::string error;
  std::vector<LabeledSequent> premises;
  LabeledSequent conclusion;
};

// Instantiates a rule and checks the side conditions: dagger freshness, and
// P1-P3 for pt rules. Does not check strictness.
ApplyResult applyLabeledRule(const LabeledRule& rule, const LabeledSubst& sub);

// P4-P7 for a pt instance; empty result means strict.
std::optional<std::string> strictViolation(const LabeledRule& rule, const LabeledSubst& sub);

// ---- proofs -----------------------------------------------------------------
struct LabeledProof {
  std::string rule;
  LabeledSubst sub;
  LabeledSequent conclusion;
  std::vector<LabeledProof> premises;

  int quantity() const;
  int width() const;
  long long size() const { return static_cast<long long>(quantity()) * width(); }
};

ProofMetrics labeledMetrics(const LabeledProof& p);

struct LabeledCheckOptions {
  bool strict = false;        // every pt instance must satisfy P4-P7
  bool polytree = false;      // every sequent must be a labeled polytree sequent
  bool allowStructural = false;  // admit explicit ls/w/cl/cr steps
  bool allowCut = false;
};

CheckResult checkLabeledProof(const LabeledCalculus& calc, const LabeledProof& p,
                              const LabeledCheckOptions& opt = {});

// One rule application, explicit or inferred substitution. Structural rules
// (ls, w, cl, cr) are handled here as well when allowed.
CheckResult checkLabeledInstance(const LabeledCalculus& calc, const LabeledRule* rule,
                                 const LabeledProof& node, const LabeledCheckOptions& opt);

// Completes a partial substitution for a non-pt rule by matching the node's
// conclusion and premises. Returns false when no completion fits.
bool inferLabeledSubst(const LabeledRule& rule, const LabeledSequent& conclusion,
                       const std::vector<LabeledSequent>& premises, const LabeledSubst& seed,
                       LabeledSubst& out);

// ---- strict structural operations -------------------------------------------
// Applies one strict structural step to a sequent, validating side conditions.
struct StructuralResult {
  bool ok = true;
  std::string error;
  LabeledSequent result;
};
StructuralResult applyStrictLs(const LabeledSequent& s, const Label& keep, const Label& merge);
StructuralResult applyStrictWeaken(const LabeledSequent& s, const LabeledSequent& extra);
StructuralResult applyContractLeft(const LabeledSequent& s, const Label& w, const Formula& f);
StructuralResult applyContractRight(const LabeledSequent& s, const Label& w, const Formula& f);

// ---- JSON -------------------------------------------------------------------
std::string labeledProofToJson(const LabeledProof& p, const LabeledCalculus& calc);
LabeledProof labeledProofFromJson(const std::string& text, const LabeledCalculus& calc);

}  // namespace tpk
