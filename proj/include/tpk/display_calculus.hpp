#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpk/axiom.hpp"
#include "tpk/structure.hpp"

namespace tpk {

// ---- schematic formulas -------------------------------------------------
// Rules mention formulas only as: an atomic variable, a formula variable, a
// constant, or one connective applied to formula variables.
enum class FPatKind : uint8_t { AtomVar, FmlVar, Top, Bot, Unary, Binary };

struct FmlPat {
  FPatKind k = FPatKind::FmlVar;
  Conn conn = Conn::Top;
  std::string v1, v2;

  static FmlPat atomVar(std::string v) { return {FPatKind::AtomVar, Conn::Atom, std::move(v), ""}; }
  static FmlPat fmlVar(std::string v) { return {FPatKind::FmlVar, Conn::Atom, std::move(v), ""}; }
  static FmlPat top() { return {FPatKind::Top, Conn::Top, "", ""}; }
  static FmlPat bot() { return {FPatKind::Bot, Conn::Bot, "", ""}; }
  static FmlPat un(Conn c, std::string v) { return {FPatKind::Unary, c, std::move(v), ""}; }
  static FmlPat bin(Conn c, std::string v1, std::string v2) { return {FPatKind::Binary, c, std::move(v1), std::move(v2)}; }
};

// ---- schematic structures ------------------------------------------------
enum class SPatKind : uint8_t { I, StructVar, Fml, Star, Bullet, Comp };

struct StructPat {
  SPatKind k = SPatKind::I;
  std::string var;
  FmlPat fml;
  std::shared_ptr<const StructPat> a, b;

  static StructPat unit() { return {}; }
  static StructPat sv(std::string name);
  static StructPat leaf(FmlPat f);
  static StructPat star(StructPat x);
  static StructPat bullet(StructPat x);
  static StructPat comp(StructPat x, StructPat y);

  std::string str() const;
};

struct SeqPat {
  StructPat ante, succ;
  std::string str() const { return ante.str() + " |- " + succ.str(); }
};

// ---- substitutions -------------------------------------------------------
struct DisplaySubst {
  std::map<std::string, std::string> atoms;
  std::map<std::string, Formula> formulas;
  std::map<std::string, Struct> structs;

  bool operator==(const DisplaySubst&) const = default;
};

// Variables a rule mentions, by kind.
struct VarSet {
  std::set<std::string> atoms, formulas, structs;
};

Formula instantiate(const FmlPat& p, const DisplaySubst& s);
Struct instantiate(const StructPat& p, const DisplaySubst& s);
DisplaySequent instantiate(const SeqPat& p, const DisplaySubst& s);

// Structural matching; extends `s` and reports failure without rollback
// guarantees (callers pass a copy when they need one).
bool match(const FmlPat& p, const Formula& f, DisplaySubst& s);
bool match(const StructPat& p, const Struct& x, DisplaySubst& s);
bool match(const SeqPat& p, const DisplaySequent& d, DisplaySubst& s);

// ---- rules ----------------------------------------------------------------
struct DisplayRule {
  std::string name;
  std::vector<SeqPat> premises;
  SeqPat conclusion;
  bool reversible = false;
  bool initial = false;
  bool isPt = false;
  int axiomIndex = -1;

  VarSet vars() const;
};

// The base calculus DKt plus one pt rule per simplified axiom.
class DisplayCalculus {
public:
  explicit DisplayCalculus(const std::vector<PrimitiveAxiom>& axioms = {});

  const DisplayRule* find(const std::string& name) const;
  const std::vector<DisplayRule>& rules() const { return rules_; }
  const std::vector<PrimitiveAxiom>& axioms() const { return axioms_; }

private:
  std::vector<DisplayRule> rules_;
  std::map<std::string, size_t> byName_;
  std::vector<PrimitiveAxiom> axioms_;
};

// psi: primitive-sublanguage formula to schematic structure. Atoms become the
// structure variable X_<atom> (one variable per atom, repeated on repeats).
StructPat psi(const Formula& f);

// One pt rule per axiom: premises psi(Bj) |- X, conclusion psi(A) |- X.
DisplayRule makeDisplayRule(const PrimitiveAxiom& ax, int index);
std::vector<DisplayRule> makeDisplayRules(const std::vector<PrimitiveAxiom>& axioms);

// ---- proofs ----------------------------------------------------------------
struct DisplayProof {
  std::string rule;
  bool up = false;  // reversible rules applied bottom-up
  DisplaySubst sub;
  DisplaySequent conclusion;
  std::vector<DisplayProof> premises;

  int quantity() const;
  int width() const;
  long long size() const { return static_cast<long long>(quantity()) * width(); }
};

struct ProofMetrics {
  int quantity = 0;
  int width = 0;
  long long size = 0;
};
ProofMetrics displayMetrics(const DisplayProof& p);

struct CheckOptions {
  bool allowCut = false;
  // Sequents that may appear as "hyp" leaves (open premises of fragments).
  std::vector<DisplaySequent> hypotheses;
};

struct CheckResult {
  bool ok = true;
  std::vector<int> path;  // premise indices from the root to the failing node
  std::string message;

  std::string pathStr() const;
};

CheckResult checkDisplayProof(const DisplayCalculus& calc, const DisplayProof& p,
                              const CheckOptions& opt = {});

// Verifies one rule application; used by the checker and by chain validation.
// If the node's substitution is partial, missing bindings are inferred by
// matching (pt rules require an explicit substitution).
CheckResult checkInstance(const DisplayCalculus& calc, const DisplayRule& rule, bool up,
                          DisplaySubst sub, const DisplaySequent& conclusion,
                          const std::vector<DisplaySequent>& premises);

// ---- JSON ------------------------------------------------------------------
std::string displayProofToJson(const DisplayProof& p, const DisplayCalculus& calc,
                               const std::vector<Formula>* axiomFormulas = nullptr);
// Accepts either a bare proof tree or {"calculus": "...", "axioms": [...],
// "proof": {...}}. If the wrapper carries axioms they must generate `calc`.
DisplayProof displayProofFromJson(const std::string& text, const DisplayCalculus& calc);
// Reads the axiom list of a wrapped proof file (empty when absent).
std::vector<Formula> proofFileAxioms(const std::string& text);

}  // namespace tpk
