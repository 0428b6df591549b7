#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpk/formula.hpp"

namespace tpk {

// A simplified primitive tense axiom A -> B1 | ... | Bm with A and every Bj in
// the sublanguage of atoms, top, &, <F>, <P>, and A containing each atom at
// most once.
struct PrimitiveAxiom {
  Formula antecedent;
  std::vector<Formula> succedents;  // non-empty

  Formula asFormula() const;
  std::string str() const { return asFormula().str(); }
};

struct AxiomRejection {
  std::string reason;
  Formula offending;  // may be empty
};

template <typename T>
struct AxiomResult {
  std::optional<T> value;
  std::optional<AxiomRejection> rejection;
  bool ok() const { return value.has_value(); }
};

// True iff f lies in the primitive sublanguage (optionally admitting |).
bool inPrimitiveGrammar(const Formula& f, bool allowOr, Formula* offending = nullptr);

// Accepts implications with both sides in the primitive grammar (no |),
// antecedent atom-linear, succedent a disjunction of |-free formulas.
AxiomResult<PrimitiveAxiom> validatePrimitiveAxiom(const Formula& f);

// Full normalization: | anywhere in either side is distributed out and the
// result is split into simplified axioms whose conjunction is equivalent to f.
AxiomResult<std::vector<PrimitiveAxiom>> normalizeAxiom(const Formula& f);

}  // namespace tpk
