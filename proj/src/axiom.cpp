#include "tpk/axiom.hpp"

#include <map>

namespace tpk {

Formula PrimitiveAxiom::asFormula() const {
  Formula d = succedents[0];
  for (size_t i = 1; i < succedents.size(); ++i) d = Formula::disj(d, succedents[i]);
  return Formula::imp(antecedent, d);
}

bool inPrimitiveGrammar(const Formula& f, bool allowOr, Formula* offending) {
  switch (f.kind()) {
    case Conn::Atom:
    case Conn::Top: return true;
    case Conn::And: return inPrimitiveGrammar(f.left(), allowOr, offending) &&
                           inPrimitiveGrammar(f.right(), allowOr, offending);
    case Conn::Or:
      if (!allowOr) {
        if (offending) *offending = f;
        return false;
      }
      return inPrimitiveGrammar(f.left(), allowOr, offending) &&
             inPrimitiveGrammar(f.right(), allowOr, offending);
    case Conn::DiaF:
    case Conn::DiaP: return inPrimitiveGrammar(f.child(), allowOr, offending);
    default:
      if (offending) *offending = f;
      return false;
  }
}

namespace {

bool atomLinear(const Formula& f, Formula* dup) {
  std::vector<std::string> as;
  f.atoms(as);
  std::map<std::string, int> seen;
  for (auto& a : as)
    if (++seen[a] > 1) {
      if (dup) *dup = Formula::atom(a);
      return false;
    }
  return true;
}

void topOrSplit(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == Conn::Or) {
    topOrSplit(f.left(), out);
    topOrSplit(f.right(), out);
  } else {
    out.push_back(f);
  }
}

// Pulls | to the top of a primitive-grammar formula: <F>/<P> distribute over
// |, and D & (A|B) splits into (D&A)|(D&B). Returns |-free disjuncts.
std::vector<Formula> disjuncts(const Formula& f) {
  switch (f.kind()) {
    case Conn::Atom:
    case Conn::Top: return {f};
    case Conn::Or: {
      auto l = disjuncts(f.left()), r = disjuncts(f.right());
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    case Conn::And: {
      auto l = disjuncts(f.left()), r = disjuncts(f.right());
      std::vector<Formula> out;
      for (auto& a : l)
        for (auto& b : r) out.push_back(Formula::conj(a, b));
      return out;
    }
    case Conn::DiaF: {
      std::vector<Formula> out;
      for (auto& a : disjuncts(f.child())) out.push_back(Formula::diaF(a));
      return out;
    }
    case Conn::DiaP: {
      std::vector<Formula> out;
      for (auto& a : disjuncts(f.child())) out.push_back(Formula::diaP(a));
      return out;
    }
    default: throw std::logic_error("disjuncts: not in primitive grammar");
  }
}

}  // namespace

AxiomResult<PrimitiveAxiom> validatePrimitiveAxiom(const Formula& f) {
  if (f.kind() != Conn::Imp)
    return {std::nullopt, AxiomRejection{"a primitive tense axiom must be an implication", f}};
  Formula bad;
  if (!inPrimitiveGrammar(f.left(), false, &bad)) {
    if (!bad.empty() && bad.kind() == Conn::Or)
      return {std::nullopt, AxiomRejection{"antecedent contains |; not simplified (use normalization)", bad}};
    return {std::nullopt, AxiomRejection{"antecedent leaves the primitive grammar", bad}};
  }
  Formula dup;
  if (!atomLinear(f.left(), &dup))
    return {std::nullopt, AxiomRejection{"antecedent contains atom " + dup.atomName() + " more than once", dup}};
  std::vector<Formula> succ;
  topOrSplit(f.right(), succ);
  for (auto& s : succ)
    if (!inPrimitiveGrammar(s, false, &bad)) {
      if (!bad.empty() && bad.kind() == Conn::Or)
        return {std::nullopt,
                AxiomRejection{"succedent has | below another connective; not simplified (use normalization)", bad}};
      return {std::nullopt, AxiomRejection{"succedent leaves the primitive grammar", bad}};
    }
  return {PrimitiveAxiom{f.left(), succ}, std::nullopt};
}

AxiomResult<std::vector<PrimitiveAxiom>> normalizeAxiom(const Formula& f) {
  if (f.kind() != Conn::Imp)
    return {std::nullopt, AxiomRejection{"a primitive tense axiom must be an implication", f}};
  Formula bad;
  if (!inPrimitiveGrammar(f.left(), true, &bad))
    return {std::nullopt, AxiomRejection{"antecedent leaves the primitive grammar", bad}};
  if (!inPrimitiveGrammar(f.right(), true, &bad))
    return {std::nullopt, AxiomRejection{"succedent leaves the primitive grammar", bad}};
  Formula dup;
  if (!atomLinear(f.left(), &dup))
    return {std::nullopt, AxiomRejection{"antecedent contains atom " + dup.atomName() + " more than once", dup}};
  std::vector<Formula> succ = disjuncts(f.right());
  std::vector<PrimitiveAxiom> out;
  for (auto& a : disjuncts(f.left())) {
    if (!atomLinear(a, &dup))
      return {std::nullopt,
              AxiomRejection{"rewritten antecedent contains atom " + dup.atomName() + " more than once", a}};
    out.push_back(PrimitiveAxiom{a, succ});
  }
  return {out, std::nullopt};
}

}  // namespace tpk
