#include "tpk/labeled_calculus.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "tpk/parse.hpp"

namespace tpk {

namespace {

Label lookupLabel(const LabeledSubst& s, const std::string& v) {
  auto it = s.labels.find(v);
  if (it == s.labels.end()) throw std::invalid_argument("unbound label variable " + v);
  return it->second;
}

Formula instantiateFml(const FmlPat& p, const LabeledSubst& s) {
  DisplaySubst d;
  d.atoms = s.atoms;
  d.formulas = s.formulas;
  return instantiate(p, d);
}

}  // namespace

LabeledSequent instantiate(const LabSeqPat& p, const LabeledSubst& s) {
  LabeledSequent out;
  for (auto& r : p.rel) out.addRel(lookupLabel(s, r.from), lookupLabel(s, r.to));
  for (auto& f : p.fmls) {
    Label l = lookupLabel(s, f.lab);
    Formula fm = instantiateFml(f.fml, s);
    if (f.inAnte)
      out.addAnte(l, fm);
    else
      out.addSucc(l, fm);
  }
  for (auto& v : p.seqvars) {
    auto it = s.seqs.find(v);
    if (it == s.seqs.end()) throw std::invalid_argument("unbound sequent variable " + v);
    out = compose(out, it->second);
  }
  return out;
}

LabVarSet LabeledRule::vars() const {
  LabVarSet v;
  auto scan = [&](const LabSeqPat& p) {
    for (auto& r : p.rel) {
      v.labels.insert(r.from);
      v.labels.insert(r.to);
    }
    for (auto& f : p.fmls) {
      v.labels.insert(f.lab);
      switch (f.fml.k) {
        case FPatKind::AtomVar: v.atoms.insert(f.fml.v1); break;
        case FPatKind::FmlVar:
        case FPatKind::Unary: v.formulas.insert(f.fml.v1); break;
        case FPatKind::Binary:
          v.formulas.insert(f.fml.v1);
          v.formulas.insert(f.fml.v2);
          break;
        default: break;
      }
    }
    for (auto& sv : p.seqvars) v.seqs.insert(sv);
  };
  for (auto& p : premises) scan(p);
  scan(conclusion);
  // Annotation labels always count as rule variables.
  for (auto& [n, a] : annvars) v.labels.insert(a.lab);
  return v;
}

// ---------------------------------------------------------------------------
// base rules

namespace {

LabSeqPat pat(std::vector<SchRel> rel, std::vector<SchFml> fmls) {
  LabSeqPat p;
  p.rel = std::move(rel);
  p.fmls = std::move(fmls);
  p.seqvars = {"S"};
  return p;
}

SchFml la(std::string lab, FmlPat f) { return {std::move(lab), std::move(f), true}; }
SchFml ra(std::string lab, FmlPat f) { return {std::move(lab), std::move(f), false}; }

LabeledRule mkRule(std::string name, std::vector<LabSeqPat> prem, LabSeqPat con,
                   std::vector<std::string> fresh = {}, bool initial = false) {
  LabeledRule r;
  r.name = std::move(name);
  r.premises = std::move(prem);
  r.conclusion = std::move(con);
  r.freshVars = std::move(fresh);
  r.initial = initial;
  return r;
}

std::vector<LabeledRule> baseLabeledRules() {
  std::vector<LabeledRule> rs;
  auto A = FmlPat::fmlVar("A"), B = FmlPat::fmlVar("B");
  auto P = FmlPat::atomVar("p");
  auto un = [&](Conn c) { return FmlPat::un(c, "A"); };
  auto bin = [&](Conn c) { return FmlPat::bin(c, "A", "B"); };

  rs.push_back(mkRule("id", {}, pat({}, {la("w", P), ra("w", P)}), {}, true));
  rs.push_back(mkRule("bot_l", {}, pat({}, {la("w", FmlPat::bot())}), {}, true));
  rs.push_back(mkRule("top_r", {}, pat({}, {ra("w", FmlPat::top())}), {}, true));
  rs.push_back(mkRule("neg_l", {pat({}, {ra("w", A)})}, pat({}, {la("w", un(Conn::Not))})));
  rs.push_back(mkRule("neg_r", {pat({}, {la("w", A)})}, pat({}, {ra("w", un(Conn::Not))})));
  rs.push_back(mkRule("and_l", {pat({}, {la("w", A), la("w", B)})}, pat({}, {la("w", bin(Conn::And))})));
  rs.push_back(mkRule("and_r", {pat({}, {ra("w", A)}), pat({}, {ra("w", B)})},
                      pat({}, {ra("w", bin(Conn::And))})));
  rs.push_back(mkRule("or_l", {pat({}, {la("w", A)}), pat({}, {la("w", B)})},
                      pat({}, {la("w", bin(Conn::Or))})));
  rs.push_back(mkRule("or_r", {pat({}, {ra("w", A), ra("w", B)})}, pat({}, {ra("w", bin(Conn::Or))})));
  rs.push_back(mkRule("imp_l", {pat({}, {ra("w", A)}), pat({}, {la("w", B)})},
                      pat({}, {la("w", bin(Conn::Imp))})));
  rs.push_back(mkRule("imp_r", {pat({}, {la("w", A), ra("w", B)})}, pat({}, {ra("w", bin(Conn::Imp))})));

  rs.push_back(mkRule("diaf_l", {pat({{"w", "u"}}, {la("u", A)})}, pat({}, {la("w", un(Conn::DiaF))}),
                      {"u"}));
  rs.push_back(mkRule("diap_l", {pat({{"u", "w"}}, {la("u", A)})}, pat({}, {la("w", un(Conn::DiaP))}),
                      {"u"}));
  rs.push_back(mkRule("boxf_r", {pat({{"w", "u"}}, {ra("u", A)})}, pat({}, {ra("w", un(Conn::BoxF))}),
                      {"u"}));
  rs.push_back(mkRule("boxp_r", {pat({{"u", "w"}}, {ra("u", A)})}, pat({}, {ra("w", un(Conn::BoxP))}),
                      {"u"}));
  rs.push_back(mkRule("boxf_l", {pat({{"w", "u"}}, {la("w", un(Conn::BoxF)), la("u", A)})},
                      pat({{"w", "u"}}, {la("w", un(Conn::BoxF))})));
  rs.push_back(mkRule("boxp_l", {pat({{"u", "w"}}, {la("w", un(Conn::BoxP)), la("u", A)})},
                      pat({{"u", "w"}}, {la("w", un(Conn::BoxP))})));
  rs.push_back(mkRule("diaf_r", {pat({{"w", "u"}}, {ra("u", A), ra("w", un(Conn::DiaF))})},
                      pat({{"w", "u"}}, {ra("w", un(Conn::DiaF))})));
  rs.push_back(mkRule("diap_r", {pat({{"u", "w"}}, {ra("w", un(Conn::DiaP)), ra("u", A)})},
                      pat({{"u", "w"}}, {ra("w", un(Conn::DiaP))})));
  return rs;
}

}  // namespace

// ---------------------------------------------------------------------------
// phi and pt rules

PtComponent phi(const Formula& f, const std::string& root, int& labelCounter, int& annCounter,
                std::map<std::string, AnnVar>& annvars) {
  PtComponent c;
  switch (f.kind()) {
    case Conn::Top: return c;
    case Conn::Atom: {
      AnnVar v;
      v.name = "L" + std::to_string(++annCounter);
      v.atom = f.atomName();
      v.lab = root;
      annvars[v.name] = v;
      c.annvars.push_back(v.name);
      c.labelVars.insert(root);
      return c;
    }
    case Conn::And: {
      PtComponent a = phi(f.left(), root, labelCounter, annCounter, annvars);
      PtComponent b = phi(f.right(), root, labelCounter, annCounter, annvars);
      c = a;
      c.rel.insert(c.rel.end(), b.rel.begin(), b.rel.end());
      c.annvars.insert(c.annvars.end(), b.annvars.begin(), b.annvars.end());
      c.labelVars.insert(b.labelVars.begin(), b.labelVars.end());
      return c;
    }
    case Conn::DiaF:
    case Conn::DiaP: {
      std::string u = "u" + std::to_string(++labelCounter);
      PtComponent inner = phi(f.child(), u, labelCounter, annCounter, annvars);
      c = inner;
      if (f.kind() == Conn::DiaF)
        c.rel.insert(c.rel.begin(), {root, u});
      else
        c.rel.insert(c.rel.begin(), {u, root});
      c.labelVars.insert(root);
      c.labelVars.insert(u);
      return c;
    }
    default: throw std::invalid_argument("phi: " + f.str() + " is not in the primitive sublanguage");
  }
}

namespace {

LabSeqPat componentPat(const PtComponent& c) {
  LabSeqPat p;
  p.rel = c.rel;
  p.seqvars = c.annvars;
  return p;
}

LabSeqPat joinPats(const LabSeqPat& a, const LabSeqPat& b) {
  LabSeqPat p = a;
  p.rel.insert(p.rel.end(), b.rel.begin(), b.rel.end());
  p.fmls.insert(p.fmls.end(), b.fmls.begin(), b.fmls.end());
  p.seqvars.insert(p.seqvars.end(), b.seqvars.begin(), b.seqvars.end());
  return p;
}

void finalizePtRule(LabeledRule& r) {
  r.isPt = true;
  r.contextVar = "S";
  LabSeqPat conPat = componentPat(r.aPart);
  conPat.seqvars.push_back(r.contextVar);
  r.conclusion = conPat;
  r.premises.clear();
  r.freshVars.clear();
  std::set<std::string> conVars = r.aPart.labelVars;
  conVars.insert(r.rootVar);
  for (auto& b : r.bParts) {
    LabSeqPat prem = joinPats(componentPat(r.aPart), componentPat(b));
    prem.seqvars.push_back(r.contextVar);
    r.premises.push_back(prem);
    // P1: variables phi introduced for this premise that do not annotate one
    // of its annotated variables must be instantiated with fresh labels.
    std::set<std::string> annLabs;
    for (auto& n : b.annvars) annLabs.insert(r.annvars.at(n).lab);
    for (auto& v : b.labelVars)
      if (!conVars.count(v) && !annLabs.count(v)) r.freshVars.push_back(v);
  }
}

}  // namespace

LabeledRule makeLabeledRule(const PrimitiveAxiom& ax, int index) {
  LabeledRule r;
  r.name = "pt:" + std::to_string(index);
  r.axiomIndex = index;
  r.rootVar = "w";
  int lc = 0, ac = 0;
  r.aPart = phi(ax.antecedent, r.rootVar, lc, ac, r.annvars);
  for (auto& b : ax.succedents) r.bParts.push_back(phi(b, r.rootVar, lc, ac, r.annvars));
  finalizePtRule(r);
  return r;
}

namespace {

// Canonical encoding of a pt rule up to renaming of label variables and
// annotated-variable names; used to deduplicate the contraction closure.
std::string ruleCanon(const LabeledRule& r) {
  // Collect label variables in a canonical discovery order: try all
  // permutations is exponential; instead use iterative refinement by encoding
  // with names assigned on first use in a canonical block ordering, which is
  // stable because block lists are sorted by their var-free shape first.
  // Rules are tiny, so we brute force over permutations of the A-part label
  // variables to obtain a true canonical form.
  std::vector<std::string> aVars(r.aPart.labelVars.begin(), r.aPart.labelVars.end());
  std::sort(aVars.begin(), aVars.end());
  std::string best;
  std::vector<std::string> perm = aVars;
  std::sort(perm.begin(), perm.end());
  do {
    std::map<std::string, std::string> ren;
    for (size_t i = 0; i < perm.size(); ++i) ren[perm[i]] = "a" + std::to_string(i);
    auto rn = [&](const std::string& v) {
      auto it = ren.find(v);
      return it == ren.end() ? v : it->second;
    };
    std::vector<std::string> relStrs;
    for (auto& e : r.aPart.rel) relStrs.push_back(rn(e.from) + ">" + rn(e.to));
    std::sort(relStrs.begin(), relStrs.end());
    std::vector<std::string> annStrs;
    for (auto& n : r.aPart.annvars) {
      auto& a = r.annvars.at(n);
      annStrs.push_back(a.atom + "@" + rn(a.lab));
    }
    std::sort(annStrs.begin(), annStrs.end());
    std::string enc = "root:" + rn(r.rootVar) + "|rel:";
    for (auto& s : relStrs) enc += s + ",";
    enc += "|ann:";
    for (auto& s : annStrs) enc += s + ",";
    enc += "|B:";
    for (auto& b : r.bParts) {
      // B-part variables are untouched by contractions except the root.
      std::vector<std::string> bs;
      for (auto& e : b.rel) bs.push_back(rn(e.from) + ">" + rn(e.to));
      std::sort(bs.begin(), bs.end());
      std::vector<std::string> ba;
      for (auto& n : b.annvars) {
        auto& a = r.annvars.at(n);
        ba.push_back(a.atom + "@" + rn(a.lab));
      }
      std::sort(ba.begin(), ba.end());
      std::string benc;
      for (auto& s : bs) benc += s + ",";
      benc += ";";
      for (auto& s : ba) benc += s + ",";
      enc += "[" + benc + "]";
    }
    if (best.empty() || enc < best) best = enc;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Applies a label-variable substitution (over A-part variables) to the rule.
LabeledRule substRule(const LabeledRule& r, const std::map<std::string, std::string>& f) {
  auto rn = [&](const std::string& v) {
    auto it = f.find(v);
    return it == f.end() ? v : it->second;
  };
  LabeledRule out = r;
  out.rootVar = rn(r.rootVar);
  auto subComp = [&](const PtComponent& c) {
    PtComponent o;
    for (auto& e : c.rel) o.rel.push_back({rn(e.from), rn(e.to)});
    o.annvars = c.annvars;
    for (auto& v : c.labelVars) o.labelVars.insert(rn(v));
    return o;
  };
  out.aPart = subComp(r.aPart);
  out.bParts.clear();
  for (auto& b : r.bParts) out.bParts.push_back(subComp(b));
  out.annvars.clear();
  for (auto& [n, a] : r.annvars) out.annvars[n] = AnnVar{a.name, a.atom, rn(a.lab)};
  return out;
}

// One contraction step: delete one of two duplicate A-part blocks.
std::vector<LabeledRule> contractionsOf(const LabeledRule& r) {
  std::vector<LabeledRule> out;
  std::vector<std::string> vars(r.aPart.labelVars.begin(), r.aPart.labelVars.end());
  size_t n = vars.size();
  if (n == 0) return out;
  // Enumerate all functions vars -> vars.
  std::vector<size_t> idx(n, 0);
  while (true) {
    std::map<std::string, std::string> f;
    bool ident = true;
    for (size_t i = 0; i < n; ++i) {
      f[vars[i]] = vars[idx[i]];
      if (idx[i] != i) ident = false;
    }
    if (!ident || true) {  // the identity map cannot create duplicates but is harmless
      LabeledRule s = substRule(r, f);
      // duplicate relational atoms
      for (size_t i = 0; i < s.aPart.rel.size(); ++i)
        for (size_t j = i + 1; j < s.aPart.rel.size(); ++j)
          if (s.aPart.rel[i] == s.aPart.rel[j]) {
            LabeledRule c = s;
            c.aPart.rel.erase(c.aPart.rel.begin() + j);
            c.aPart.labelVars.clear();
            for (auto& e : c.aPart.rel) {
              c.aPart.labelVars.insert(e.from);
              c.aPart.labelVars.insert(e.to);
            }
            for (auto& nm : c.aPart.annvars) c.aPart.labelVars.insert(c.annvars.at(nm).lab);
            finalizePtRule(c);
            out.push_back(c);
          }
      // duplicate annotated variables: same atom, same annotation label
      for (size_t i = 0; i < s.aPart.annvars.size(); ++i)
        for (size_t j = i + 1; j < s.aPart.annvars.size(); ++j) {
          auto &ai = s.annvars.at(s.aPart.annvars[i]), &aj = s.annvars.at(s.aPart.annvars[j]);
          if (ai.atom == aj.atom && ai.lab == aj.lab) {
            LabeledRule c = s;
            std::string dropped = c.aPart.annvars[j];
            c.aPart.annvars.erase(c.aPart.annvars.begin() + j);
            c.annvars.erase(dropped);
            c.aPart.labelVars.clear();
            for (auto& e : c.aPart.rel) {
              c.aPart.labelVars.insert(e.from);
              c.aPart.labelVars.insert(e.to);
            }
            for (auto& nm : c.aPart.annvars) c.aPart.labelVars.insert(c.annvars.at(nm).lab);
            finalizePtRule(c);
            out.push_back(c);
          }
        }
    }
    // next function
    size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return out;
}

}  // namespace

std::vector<LabeledRule> makeLabeledRules(const PrimitiveAxiom& ax, int index) {
  LabeledRule base = makeLabeledRule(ax, index);
  std::vector<LabeledRule> out{base};
  std::set<std::string> seen{ruleCanon(base)};
  size_t next = 0;
  int counter = 0;
  while (next < out.size()) {
    LabeledRule cur = out[next++];
    for (auto& c : contractionsOf(cur)) {
      std::string enc = ruleCanon(c);
      if (seen.insert(enc).second) {
        LabeledRule named = c;
        named.name = "pt:" + std::to_string(index) + "." + std::to_string(++counter);
        out.push_back(named);
      }
    }
  }
  return out;
}

LabeledCalculus::LabeledCalculus(const std::vector<PrimitiveAxiom>& axioms) : axioms_(axioms) {
  rules_ = baseLabeledRules();
  for (size_t i = 0; i < axioms.size(); ++i)
    for (auto& r : makeLabeledRules(axioms[i], int(i))) rules_.push_back(r);
  for (size_t i = 0; i < rules_.size(); ++i) byName_[rules_[i].name] = i;
}

const LabeledRule* LabeledCalculus::find(const std::string& name) const {
  auto it = byName_.find(name);
  return it == byName_.end() ? nullptr : &rules_[it->second];
}

std::vector<const LabeledRule*> LabeledCalculus::ptClosure(int axiomIndex) const {
  std::vector<const LabeledRule*> out;
  for (auto& r : rules_)
    if (r.isPt && r.axiomIndex == axiomIndex) out.push_back(&r);
  return out;
}

// ---------------------------------------------------------------------------
// printing

std::string patternStr(const LabSeqPat& p, const LabeledRule& rule) {
  std::vector<std::string> parts;
  for (auto& r : p.rel) parts.push_back("(R " + r.from + " " + r.to + " =>)");
  for (auto& f : p.fmls) {
    std::string body = f.lab + ": " + [&] {
      switch (f.fml.k) {
        case FPatKind::AtomVar: return f.fml.v1;
        case FPatKind::FmlVar: return f.fml.v1;
        case FPatKind::Top: return std::string("top");
        case FPatKind::Bot: return std::string("bot");
        case FPatKind::Unary:
          switch (f.fml.conn) {
            case Conn::Not: return "~" + f.fml.v1;
            case Conn::BoxF: return "[F]" + f.fml.v1;
            case Conn::DiaF: return "<F>" + f.fml.v1;
            case Conn::BoxP: return "[P]" + f.fml.v1;
            default: return "<P>" + f.fml.v1;
          }
        default: {
          const char* op = f.fml.conn == Conn::And ? " & " : f.fml.conn == Conn::Or ? " | " : " -> ";
          return f.fml.v1 + op + f.fml.v2;
        }
      }
    }();
    parts.push_back(f.inAnte ? "(" + body + " =>)" : "(=> " + body + ")");
  }
  for (auto& sv : p.seqvars) {
    auto it = rule.annvars.find(sv);
    if (it != rule.annvars.end())
      parts.push_back(sv + "[" + it->second.atom + "@" + it->second.lab + "]");
    else
      parts.push_back(sv);
  }
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " (+) ";
    out += parts[i];
  }
  return out.empty() ? "(=>)" : out;
}

LabeledRulePrint printRule(const LabeledRule& r) {
  LabeledRulePrint out;
  out.name = r.name;
  for (auto& p : r.premises) out.premises.push_back(patternStr(p, r));
  out.conclusion = patternStr(r.conclusion, r);
  std::string side;
  if (!r.freshVars.empty()) {
    side += "fresh:";
    for (auto& v : r.freshVars) side += " " + v;
  }
  if (r.isPt) side += (side.empty() ? "" : "; ") + std::string("P1-P3 apply");
  out.sideConditions = side;
  return out;
}

// ---------------------------------------------------------------------------
// rule application and side conditions

namespace {

bool substTotal(const LabeledRule& rule, const LabeledSubst& s, std::string* missing) {
  LabVarSet v = rule.vars();
  for (auto& x : v.labels)
    if (!s.labels.count(x)) {
      if (missing) *missing = "label variable " + x;
      return false;
    }
  for (auto& x : v.atoms)
    if (!s.atoms.count(x)) {
      if (missing) *missing = "atomic variable " + x;
      return false;
    }
  for (auto& x : v.formulas)
    if (!s.formulas.count(x)) {
      if (missing) *missing = "formula variable " + x;
      return false;
    }
  for (auto& x : v.seqs)
    if (!s.seqs.count(x)) {
      if (missing) *missing = "sequent variable " + x;
      return false;
    }
  return true;
}

LabeledSequent instantiateComponent(const PtComponent& c, const LabeledSubst& s) {
  LabSeqPat p;
  p.rel = c.rel;
  p.seqvars = c.annvars;
  return instantiate(p, s);
}

}  // namespace

ApplyResult applyLabeledRule(const LabeledRule& rule, const LabeledSubst& sub) {
  ApplyResult res;
  std::string missing;
  if (!substTotal(rule, sub, &missing)) {
    res.ok = false;
    res.error = "substitution not total: missing " + missing;
    return res;
  }
  res.conclusion = instantiate(rule.conclusion, sub);
  for (auto& p : rule.premises) res.premises.push_back(instantiate(p, sub));
  // dagger / P1 freshness against the instantiated conclusion
  std::set<Label> conLabs = res.conclusion.labels();
  for (auto& v : rule.freshVars) {
    Label l = sub.labels.at(v);
    if (conLabs.count(l)) {
      res.ok = false;
      res.error = "freshness violated: " + v + " := " + l + " occurs in the conclusion";
      return res;
    }
  }
  if (rule.isPt) {
    // P2: same-atom annotated variables take isomorphic instantiations.
    std::vector<const AnnVar*> anns;
    for (auto& [n, a] : rule.annvars) anns.push_back(&a);
    for (size_t i = 0; i < anns.size(); ++i)
      for (size_t j = i + 1; j < anns.size(); ++j)
        if (anns[i]->atom == anns[j]->atom) {
          if (!isomorphic(sub.seqs.at(anns[i]->name), sub.seqs.at(anns[j]->name))) {
            res.ok = false;
            res.error = "P2 violated: " + anns[i]->name + " and " + anns[j]->name +
                        " (atom " + anns[i]->atom + ") are not isomorphic";
            return res;
          }
        }
    // P3: a non-empty instantiation must mention its annotation label.
    for (auto* a : anns) {
      const LabeledSequent& s = sub.seqs.at(a->name);
      if (!s.isEmpty() && !s.labels().count(sub.labels.at(a->lab))) {
        res.ok = false;
        res.error = "P3 violated: " + a->name + " does not mention its annotation label";
        return res;
      }
    }
  }
  return res;
}

std::optional<std::string> strictViolation(const LabeledRule& rule, const LabeledSubst& sub) {
  if (!rule.isPt) return std::nullopt;
  LabVarSet vars = rule.vars();
  // P4: injective on label variables
  std::map<Label, std::string> seen;
  for (auto& v : vars.labels) {
    Label l = sub.labels.at(v);
    auto [it, fresh] = seen.try_emplace(l, v);
    if (!fresh && it->second != v)
      return "P4 violated: label variables " + it->second + " and " + v + " both map to " + l;
  }
  // P5: annotated instantiations overlap only as allowed
  std::vector<const AnnVar*> anns;
  for (auto& [n, a] : rule.annvars) anns.push_back(&a);
  for (size_t i = 0; i < anns.size(); ++i)
    for (size_t j = i + 1; j < anns.size(); ++j) {
      const LabeledSequent &si = sub.seqs.at(anns[i]->name), &sj = sub.seqs.at(anns[j]->name);
      if (si.isEmpty() || sj.isEmpty()) continue;
      std::set<Label> li = si.labels(), lj = sj.labels();
      std::vector<Label> inter;
      std::set_intersection(li.begin(), li.end(), lj.begin(), lj.end(), std::back_inserter(inter));
      if (sub.labels.at(anns[i]->lab) != sub.labels.at(anns[j]->lab)) {
        if (!inter.empty())
          return "P5 violated: " + anns[i]->name + " and " + anns[j]->name + " share label " + inter[0];
      } else {
        if (inter.size() != 1 || inter[0] != sub.labels.at(anns[i]->lab))
          return "P5 violated: " + anns[i]->name + " and " + anns[j]->name +
                 " must overlap exactly at their annotation label";
      }
    }
  // P6: each phi component and the context overlap exactly at the root
  const LabeledSequent& ctx = sub.seqs.at(rule.contextVar);
  Label root = sub.labels.at(rule.rootVar);
  auto checkComponent = [&](const PtComponent& c, const std::string& which) -> std::optional<std::string> {
    LabeledSequent inst = instantiateComponent(c, sub);
    if (inst.isEmpty() || ctx.isEmpty()) return std::nullopt;
    std::set<Label> li = inst.labels(), lc = ctx.labels();
    std::vector<Label> inter;
    std::set_intersection(li.begin(), li.end(), lc.begin(), lc.end(), std::back_inserter(inter));
    if (inter.size() != 1 || inter[0] != root)
      return "P6 violated: phi(" + which + ") and the context must overlap exactly at " + root;
    return std::nullopt;
  };
  if (auto e = checkComponent(rule.aPart, "A")) return e;
  for (size_t j = 0; j < rule.bParts.size(); ++j)
    if (auto e = checkComponent(rule.bParts[j], "B" + std::to_string(j + 1))) return e;
  // P7: every sequent variable holds a polytree
  for (auto& [name, s] : sub.seqs) {
    (void)name;
    if (!isPolytree(s)) return "P7 violated: " + name + " is not a labeled polytree sequent";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// proofs and checking

int LabeledProof::quantity() const {
  int q = 1;
  for (auto& p : premises) q += p.quantity();
  return q;
}

int LabeledProof::width() const {
  int w = conclusion.length();
  for (auto& p : premises) w = std::max(w, p.width());
  return w;
}

ProofMetrics labeledMetrics(const LabeledProof& p) { return {p.quantity(), p.width(), p.size()}; }

namespace {

CheckResult failAt(std::string msg) {
  CheckResult r;
  r.ok = false;
  r.message = std::move(msg);
  return r;
}

// Multiset/sets difference: conclusion minus an instantiated part; the rel
// atoms stay (sets absorb duplicates).
LabeledSequent contextRemainder(const LabeledSequent& whole, const std::vector<LabFml>& anteDrop,
                                const std::vector<LabFml>& succDrop) {
  LabeledSequent s = whole;
  for (auto& x : anteDrop) s.removeAnte(x.lab, x.fml);
  for (auto& x : succDrop) s.removeSucc(x.lab, x.fml);
  return s;
}

// Inference of substitutions for non-pt rules: enumerate assignments of the
// conclusion pattern's explicit items against the node conclusion, derive the
// context, then bind premise-only variables against the children.
bool inferSubstImpl(const LabeledRule& rule, const LabeledSequent& conclusion,
                const std::vector<LabeledSequent>& premises, LabeledSubst seed, LabeledSubst& out) {
  struct Item {
    const SchFml* f;
  };
  // Gather conclusion items: bind lab + formula vars.
  std::vector<const SchFml*> conItems;
  for (auto& f : rule.conclusion.fmls) conItems.push_back(&f);
  std::vector<const SchRel*> conRels;
  for (auto& r : rule.conclusion.rel) conRels.push_back(&r);

  std::function<bool(size_t, LabeledSubst&)> tryItems;
  std::function<bool(size_t, LabeledSubst&)> tryRels = [&](size_t i, LabeledSubst& s) -> bool {
    if (i == conRels.size()) {
      LabeledSubst s2 = s;
      // context = conclusion minus chosen formula items
      std::vector<LabFml> dropA, dropS;
      for (auto* f : conItems) {
        Label l = s2.labels.at(f->lab);
        DisplaySubst d;
        d.atoms = s2.atoms;
        d.formulas = s2.formulas;
        Formula fm = instantiate(f->fml, d);
        (f->inAnte ? dropA : dropS).push_back({l, fm});
      }
      LabeledSequent ctx = contextRemainder(conclusion, dropA, dropS);
      s2.seqs[rule.contextVar.empty() ? "S" : rule.contextVar] = ctx;
      // premise-only label variables: enumerate candidates from children
      LabVarSet vars = rule.vars();
      std::vector<std::string> missing;
      for (auto& v : vars.labels)
        if (!s2.labels.count(v)) missing.push_back(v);
      std::set<Label> candidates;
      for (auto& pr : premises)
        for (auto& l : pr.labels()) candidates.insert(l);
      std::function<bool(size_t)> assign = [&](size_t k) -> bool {
        if (k == missing.size()) {
          // premise-only formula variables: match premise patterns directly
          for (size_t pi = 0; pi < rule.premises.size(); ++pi) {
            for (auto& f : rule.premises[pi].fmls) {
              bool needsFml = (f.fml.k == FPatKind::FmlVar && !s2.formulas.count(f.fml.v1)) ||
                              (f.fml.k == FPatKind::AtomVar && !s2.atoms.count(f.fml.v1));
              if (!needsFml) continue;
              if (!s2.labels.count(f.lab)) return false;
              Label l = s2.labels.at(f.lab);
              const auto& items = f.inAnte ? premises[pi].ante : premises[pi].succ;
              for (auto& it : items) {
                if (it.lab != l) continue;
                if (f.fml.k == FPatKind::FmlVar) {
                  s2.formulas[f.fml.v1] = it.fml;
                  break;
                }
                if (f.fml.k == FPatKind::AtomVar && it.fml.kind() == Conn::Atom) {
                  s2.atoms[f.fml.v1] = it.fml.atomName();
                  break;
                }
              }
            }
          }
          if (!substTotal(rule, s2, nullptr)) return false;
          ApplyResult ar = applyLabeledRule(rule, s2);
          if (!ar.ok || ar.conclusion != conclusion) return false;
          if (ar.premises.size() != premises.size()) return false;
          for (size_t i2 = 0; i2 < premises.size(); ++i2)
            if (ar.premises[i2] != premises[i2]) return false;
          out = s2;
          return true;
        }
        for (auto& c : candidates) {
          LabeledSubst save = s2;
          s2.labels[missing[k]] = c;
          if (assign(k + 1)) return true;
          s2 = save;
        }
        return false;
      };
      return assign(0);
    }
    const SchRel* r = conRels[i];
    for (auto& e : conclusion.rel) {
      LabeledSubst save = s;
      bool ok = true;
      auto bindLab = [&](const std::string& v, const Label& l) {
        auto [it, fresh] = s.labels.try_emplace(v, l);
        return fresh || it->second == l;
      };
      ok = bindLab(r->from, e.from) && bindLab(r->to, e.to);
      if (ok && tryRels(i + 1, s)) return true;
      s = save;
    }
    return false;
  };

  tryItems = [&](size_t i, LabeledSubst& s) -> bool {
    if (i == conItems.size()) return tryRels(0, s);
    const SchFml* f = conItems[i];
    const auto& items = f->inAnte ? conclusion.ante : conclusion.succ;
    for (auto& it : items) {
      LabeledSubst save = s;
      bool ok = true;
      auto [lit, fresh] = s.labels.try_emplace(f->lab, it.lab);
      ok = fresh || lit->second == it.lab;
      if (ok) {
        DisplaySubst d;
        d.atoms = s.atoms;
        d.formulas = s.formulas;
        if (match(f->fml, it.fml, d)) {
          s.atoms = d.atoms;
          s.formulas = d.formulas;
          if (tryItems(i + 1, s)) return true;
        }
      }
      s = save;
    }
    return false;
  };

  return tryItems(0, seed);
}

}  // namespace

CheckResult checkLabeledInstance(const LabeledCalculus& calc, const LabeledRule* rule,
                                 const LabeledProof& node, const LabeledCheckOptions& opt) {
  (void)calc;
  std::vector<LabeledSequent> prems;
  for (auto& q : node.premises) prems.push_back(q.conclusion);

  // Structural rules are not part of the calculus proper.
  if (node.rule == "ls" || node.rule == "w" || node.rule == "cl" || node.rule == "cr") {
    if (!opt.allowStructural) return failAt("structural rule " + node.rule + " not allowed here");
    if (prems.size() != 1) return failAt(node.rule + " takes one premise");
    const LabeledSequent& prem = prems[0];
    if (node.rule == "ls") {
      Label keep, merge;
      if (node.sub.labels.count("w") && node.sub.labels.count("v")) {
        keep = node.sub.labels.at("w");
        merge = node.sub.labels.at("v");
      } else {
        // infer: a label of the premise missing from the conclusion
        std::set<Label> pl = prem.labels(), cl = node.conclusion.labels();
        for (auto& l : pl)
          if (!cl.count(l)) merge = l;
        if (merge.empty()) return failAt("cannot infer the merged label for ls");
        bool found = false;
        for (auto& l : cl) {
          auto sr = applyStrictLs(prem, l, merge);
          if (sr.ok && sr.result == node.conclusion) {
            keep = l;
            found = true;
            break;
          }
        }
        if (!found) return failAt("no label substitution yields the conclusion");
      }
      auto sr = applyStrictLs(prem, keep, merge);
      if (!sr.ok) return failAt(sr.error);
      if (sr.result != node.conclusion) return failAt("ls conclusion mismatch");
      return {};
    }
    if (node.rule == "w") {
      LabeledSequent extra;
      if (node.sub.seqs.count("T")) {
        extra = node.sub.seqs.at("T");
      } else {
        extra = node.conclusion;
        for (auto& r : prem.rel) extra.rel.erase(r);
        for (auto& x : prem.ante)
          if (!extra.removeAnte(x.lab, x.fml)) return failAt("premise is not part of the conclusion");
        for (auto& x : prem.succ)
          if (!extra.removeSucc(x.lab, x.fml)) return failAt("premise is not part of the conclusion");
      }
      auto sr = applyStrictWeaken(prem, extra);
      if (!sr.ok) return failAt(sr.error);
      if (sr.result != node.conclusion) return failAt("w conclusion mismatch");
      return {};
    }
    // cl / cr
    Label w;
    Formula f;
    bool found = false;
    if (node.sub.labels.count("w") && node.sub.formulas.count("A")) {
      w = node.sub.labels.at("w");
      f = node.sub.formulas.at("A");
      found = true;
    } else {
      const auto& items = node.rule == "cl" ? node.conclusion.ante : node.conclusion.succ;
      for (auto& it : items) {
        int cPrem = node.rule == "cl" ? prem.countAnte(it.lab, it.fml) : prem.countSucc(it.lab, it.fml);
        int cCon = node.rule == "cl" ? node.conclusion.countAnte(it.lab, it.fml)
                                     : node.conclusion.countSucc(it.lab, it.fml);
        if (cPrem == cCon + 1) {
          w = it.lab;
          f = it.fml;
          found = true;
          break;
        }
      }
    }
    if (!found) return failAt("cannot identify the contracted formula");
    auto sr = node.rule == "cl" ? applyContractLeft(prem, w, f) : applyContractRight(prem, w, f);
    if (!sr.ok) return failAt(sr.error);
    if (sr.result != node.conclusion) return failAt(node.rule + " conclusion mismatch");
    return {};
  }

  if (node.rule == "cut") {
    if (!opt.allowCut) return failAt("cut is not allowed here");
    if (prems.size() != 2) return failAt("cut takes two premises");
    if (!node.sub.labels.count("w") || !node.sub.formulas.count("A") || !node.sub.seqs.count("S"))
      return failAt("cut requires an explicit substitution (w, A, S)");
    Label w = node.sub.labels.at("w");
    Formula f = node.sub.formulas.at("A");
    LabeledSequent ctx = node.sub.seqs.at("S");
    LabeledSequent p1 = ctx, p2 = ctx;
    p1.addSucc(w, f);
    p2.addAnte(w, f);
    if (prems[0] != p1 || prems[1] != p2 || node.conclusion != ctx) return failAt("cut instance mismatch");
    return {};
  }

  if (!rule) return failAt("unknown rule " + node.rule);

  LabeledSubst sub = node.sub;
  if (!substTotal(*rule, sub, nullptr)) {
    if (rule->isPt) return failAt("pt rules require an explicit, total substitution");
    LabeledSubst inferred;
    if (!inferSubstImpl(*rule, node.conclusion, prems, sub, inferred))
      return failAt("no substitution makes this a " + rule->name + " instance");
    sub = inferred;
  }
  ApplyResult ar = applyLabeledRule(*rule, sub);
  if (!ar.ok) return failAt(ar.error);
  if (ar.conclusion != node.conclusion)
    return failAt("conclusion mismatch for " + rule->name + ": expected '" + ar.conclusion.str() +
                  "', found '" + node.conclusion.str() + "'");
  if (ar.premises.size() != prems.size())
    return failAt(rule->name + " expects " + std::to_string(ar.premises.size()) + " premises");
  for (size_t i = 0; i < prems.size(); ++i)
    if (ar.premises[i] != prems[i])
      return failAt("premise " + std::to_string(i) + " mismatch for " + rule->name + ": expected '" +
                    ar.premises[i].str() + "', found '" + prems[i].str() + "'");
  if (opt.strict && rule->isPt) {
    if (auto v = strictViolation(*rule, sub)) return failAt(*v);
  }
  return {};
}

namespace {

CheckResult checkLabeledNode(const LabeledCalculus& calc, const LabeledProof& p,
                             const LabeledCheckOptions& opt, std::vector<int>& path) {
  if (opt.polytree) {
    auto pc = polytreeCheck(p.conclusion);
    if (!pc.ok) {
      CheckResult r = failAt("sequent is not a labeled polytree sequent: " + pc.reason);
      r.path = path;
      return r;
    }
  }
  CheckResult r = checkLabeledInstance(calc, calc.find(p.rule), p, opt);
  if (!r.ok) {
    r.path = path;
    return r;
  }
  for (size_t i = 0; i < p.premises.size(); ++i) {
    path.push_back(int(i));
    CheckResult cr = checkLabeledNode(calc, p.premises[i], opt, path);
    if (!cr.ok) return cr;
    path.pop_back();
  }
  return {};
}

}  // namespace

CheckResult checkLabeledProof(const LabeledCalculus& calc, const LabeledProof& p,
                              const LabeledCheckOptions& opt) {
  std::vector<int> path;
  return checkLabeledNode(calc, p, opt, path);
}

bool inferLabeledSubst(const LabeledRule& rule, const LabeledSequent& conclusion,
                       const std::vector<LabeledSequent>& premises, const LabeledSubst& seed,
                       LabeledSubst& out) {
  return inferSubstImpl(rule, conclusion, premises, seed, out);
}

// ---------------------------------------------------------------------------
// strict structural operations

StructuralResult applyStrictLs(const LabeledSequent& s, const Label& keep, const Label& merge) {
  StructuralResult r;
  bool shared = false;
  for (auto& e : s.rel) {
    if (e.to == keep || e.to == merge) {
      Label parent = e.from;
      if (s.rel.count({parent, keep}) && s.rel.count({parent, merge})) shared = true;
    }
    if (e.from == keep || e.from == merge) {
      Label child = e.to;
      if (s.rel.count({keep, child}) && s.rel.count({merge, child})) shared = true;
    }
  }
  if (!shared) {
    r.ok = false;
    r.error = "ls: " + keep + " and " + merge + " are not siblings under a shared parent or child";
    return r;
  }
  r.result = labelSubstitute(s, merge, keep);
  return r;
}

StructuralResult applyStrictWeaken(const LabeledSequent& s, const LabeledSequent& extra) {
  StructuralResult r;
  if (!isPolytree(extra)) {
    r.ok = false;
    r.error = "w: the weakened-in part is not a labeled polytree sequent";
    return r;
  }
  if (!s.isEmpty() && !extra.isEmpty()) {
    std::set<Label> a = s.labels(), b = extra.labels();
    std::vector<Label> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    if (inter.size() != 1) {
      r.ok = false;
      r.error = "w: the weakened-in part must share exactly one label with the host";
      return r;
    }
  }
  r.result = compose(s, extra);
  return r;
}

StructuralResult applyContractLeft(const LabeledSequent& s, const Label& w, const Formula& f) {
  StructuralResult r;
  if (s.countAnte(w, f) < 2) {
    r.ok = false;
    r.error = "cl: " + w + ": " + f.str() + " does not occur twice on the left";
    return r;
  }
  r.result = s;
  r.result.removeAnte(w, f);
  return r;
}

StructuralResult applyContractRight(const LabeledSequent& s, const Label& w, const Formula& f) {
  StructuralResult r;
  if (s.countSucc(w, f) < 2) {
    r.ok = false;
    r.error = "cr: " + w + ": " + f.str() + " does not occur twice on the right";
    return r;
  }
  r.result = s;
  r.result.removeSucc(w, f);
  return r;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json labSubstToJson(const LabeledSubst& s) {
  nlohmann::json j = nlohmann::json::object();
  for (auto& [k, v] : s.labels) j[k] = v;
  for (auto& [k, v] : s.atoms) j[k] = v;
  for (auto& [k, v] : s.formulas) j[k] = v.str();
  for (auto& [k, v] : s.seqs) j[k] = v.str();
  return j;
}

nlohmann::json labProofToJson(const LabeledProof& p) {
  nlohmann::json j;
  j["rule"] = p.rule;
  if (!p.sub.labels.empty() || !p.sub.atoms.empty() || !p.sub.formulas.empty() || !p.sub.seqs.empty())
    j["subst"] = labSubstToJson(p.sub);
  j["conclusion"] = p.conclusion.str();
  auto arr = nlohmann::json::array();
  for (auto& q : p.premises) arr.push_back(labProofToJson(q));
  j["premises"] = arr;
  return j;
}

LabeledProof labProofFromJson(const nlohmann::json& j, const LabeledCalculus& calc) {
  LabeledProof p;
  p.rule = j.at("rule").get<std::string>();
  p.conclusion = parseLabeledSequent(j.at("conclusion").get<std::string>());
  if (j.contains("subst")) {
    LabVarSet vars;
    if (const LabeledRule* rule = calc.find(p.rule)) {
      vars = rule->vars();
    } else if (p.rule == "ls") {
      vars.labels = {"w", "v"};
      vars.seqs = {"S"};
    } else if (p.rule == "w") {
      vars.seqs = {"S", "T"};
    } else if (p.rule == "cl" || p.rule == "cr") {
      vars.labels = {"w"};
      vars.formulas = {"A"};
      vars.seqs = {"S"};
    } else if (p.rule == "cut") {
      vars.labels = {"w"};
      vars.formulas = {"A"};
      vars.seqs = {"S"};
    }
    for (auto& [k, v] : j["subst"].items()) {
      std::string text = v.get<std::string>();
      if (vars.labels.count(k))
        p.sub.labels[k] = text;
      else if (vars.atoms.count(k))
        p.sub.atoms[k] = text;
      else if (vars.formulas.count(k))
        p.sub.formulas[k] = parseFormula(text);
      else
        p.sub.seqs[k] = parseLabeledSequent(text);
    }
  }
  if (j.contains("premises"))
    for (auto& q : j["premises"]) p.premises.push_back(labProofFromJson(q, calc));
  return p;
}

}  // namespace

std::string labeledProofToJson(const LabeledProof& p, const LabeledCalculus& calc) {
  nlohmann::json j;
  j["calculus"] = "G3KtP";
  auto axs = nlohmann::json::array();
  for (auto& a : calc.axioms()) axs.push_back(a.str());
  j["axioms"] = axs;
  j["proof"] = labProofToJson(p);
  return j.dump(2);
}

LabeledProof labeledProofFromJson(const std::string& text, const LabeledCalculus& calc) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.contains("proof")) return labProofFromJson(j["proof"], calc);
  return labProofFromJson(j, calc);
}

}  // namespace tpk
