#include "tpk/display_calculus.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "tpk/parse.hpp"

namespace tpk {

StructPat StructPat::sv(std::string name) {
  StructPat p;
  p.k = SPatKind::StructVar;
  p.var = std::move(name);
  return p;
}

StructPat StructPat::leaf(FmlPat f) {
  StructPat p;
  p.k = SPatKind::Fml;
  p.fml = std::move(f);
  return p;
}

StructPat StructPat::star(StructPat x) {
  StructPat p;
  p.k = SPatKind::Star;
  p.a = std::make_shared<const StructPat>(std::move(x));
  return p;
}

StructPat StructPat::bullet(StructPat x) {
  StructPat p;
  p.k = SPatKind::Bullet;
  p.a = std::make_shared<const StructPat>(std::move(x));
  return p;
}

StructPat StructPat::comp(StructPat x, StructPat y) {
  StructPat p;
  p.k = SPatKind::Comp;
  p.a = std::make_shared<const StructPat>(std::move(x));
  p.b = std::make_shared<const StructPat>(std::move(y));
  return p;
}

namespace {

std::string fmlPatStr(const FmlPat& f) {
  switch (f.k) {
    case FPatKind::AtomVar: return f.v1 + "?";
    case FPatKind::FmlVar: return f.v1 + "!";
    case FPatKind::Top: return "top";
    case FPatKind::Bot: return "bot";
    case FPatKind::Unary:
      switch (f.conn) {
        case Conn::Not: return "~" + f.v1 + "!";
        case Conn::BoxF: return "[F]" + f.v1 + "!";
        case Conn::DiaF: return "<F>" + f.v1 + "!";
        case Conn::BoxP: return "[P]" + f.v1 + "!";
        default: return "<P>" + f.v1 + "!";
      }
    case FPatKind::Binary: {
      const char* op = f.conn == Conn::And ? " & " : f.conn == Conn::Or ? " | " : " -> ";
      return "(" + f.v1 + "!" + op + f.v2 + "!)";
    }
  }
  return "?";
}

}  // namespace

std::string StructPat::str() const {
  switch (k) {
    case SPatKind::I: return "I";
    case SPatKind::StructVar: return var;
    case SPatKind::Fml: return fmlPatStr(fml);
    case SPatKind::Star: return "*" + (a->k == SPatKind::Comp ? "(" + a->str() + ")" : a->str());
    case SPatKind::Bullet: return "@" + (a->k == SPatKind::Comp ? "(" + a->str() + ")" : a->str());
    case SPatKind::Comp: {
      std::string l = a->str(), r = b->str();
      if (b->k == SPatKind::Comp) r = "(" + r + ")";
      return l + " o " + r;
    }
  }
  return "?";
}

Formula instantiate(const FmlPat& p, const DisplaySubst& s) {
  switch (p.k) {
    case FPatKind::AtomVar: {
      auto it = s.atoms.find(p.v1);
      if (it == s.atoms.end()) throw std::invalid_argument("unbound atomic variable " + p.v1);
      return Formula::atom(it->second);
    }
    case FPatKind::FmlVar: {
      auto it = s.formulas.find(p.v1);
      if (it == s.formulas.end()) throw std::invalid_argument("unbound formula variable " + p.v1);
      return it->second;
    }
    case FPatKind::Top: return Formula::top();
    case FPatKind::Bot: return Formula::bot();
    case FPatKind::Unary: {
      auto it = s.formulas.find(p.v1);
      if (it == s.formulas.end()) throw std::invalid_argument("unbound formula variable " + p.v1);
      return Formula::unary(p.conn, it->second);
    }
    case FPatKind::Binary: {
      auto a = s.formulas.find(p.v1), b = s.formulas.find(p.v2);
      if (a == s.formulas.end()) throw std::invalid_argument("unbound formula variable " + p.v1);
      if (b == s.formulas.end()) throw std::invalid_argument("unbound formula variable " + p.v2);
      return Formula::binary(p.conn, a->second, b->second);
    }
  }
  throw std::logic_error("instantiate FmlPat");
}

Struct instantiate(const StructPat& p, const DisplaySubst& s) {
  switch (p.k) {
    case SPatKind::I: return Struct::unit();
    case SPatKind::StructVar: {
      auto it = s.structs.find(p.var);
      if (it == s.structs.end()) throw std::invalid_argument("unbound structure variable " + p.var);
      return it->second;
    }
    case SPatKind::Fml: return Struct::fml(instantiate(p.fml, s));
    case SPatKind::Star: return Struct::star(instantiate(*p.a, s));
    case SPatKind::Bullet: return Struct::bullet(instantiate(*p.a, s));
    case SPatKind::Comp: return Struct::comp(instantiate(*p.a, s), instantiate(*p.b, s));
  }
  throw std::logic_error("instantiate StructPat");
}

DisplaySequent instantiate(const SeqPat& p, const DisplaySubst& s) {
  return {instantiate(p.ante, s), instantiate(p.succ, s)};
}

namespace {

bool bindAtom(DisplaySubst& s, const std::string& v, const std::string& a) {
  auto [it, fresh] = s.atoms.try_emplace(v, a);
  return fresh || it->second == a;
}

bool bindFml(DisplaySubst& s, const std::string& v, const Formula& f) {
  auto [it, fresh] = s.formulas.try_emplace(v, f);
  return fresh || it->second == f;
}

bool bindStruct(DisplaySubst& s, const std::string& v, const Struct& x) {
  auto [it, fresh] = s.structs.try_emplace(v, x);
  return fresh || it->second == x;
}

}  // namespace

bool match(const FmlPat& p, const Formula& f, DisplaySubst& s) {
  switch (p.k) {
    case FPatKind::AtomVar: return f.kind() == Conn::Atom && bindAtom(s, p.v1, f.atomName());
    case FPatKind::FmlVar: return bindFml(s, p.v1, f);
    case FPatKind::Top: return f.kind() == Conn::Top;
    case FPatKind::Bot: return f.kind() == Conn::Bot;
    case FPatKind::Unary: return f.kind() == p.conn && bindFml(s, p.v1, f.child());
    case FPatKind::Binary:
      return f.kind() == p.conn && bindFml(s, p.v1, f.left()) && bindFml(s, p.v2, f.right());
  }
  return false;
}

bool match(const StructPat& p, const Struct& x, DisplaySubst& s) {
  switch (p.k) {
    case SPatKind::I: return x.kind() == SKind::I;
    case SPatKind::StructVar: return bindStruct(s, p.var, x);
    case SPatKind::Fml: return x.kind() == SKind::Fml && match(p.fml, x.formula(), s);
    case SPatKind::Star: return x.kind() == SKind::Star && match(*p.a, x.child(), s);
    case SPatKind::Bullet: return x.kind() == SKind::Bullet && match(*p.a, x.child(), s);
    case SPatKind::Comp:
      return x.kind() == SKind::Comp && match(*p.a, x.left(), s) && match(*p.b, x.right(), s);
  }
  return false;
}

bool match(const SeqPat& p, const DisplaySequent& d, DisplaySubst& s) {
  return match(p.ante, d.ante, s) && match(p.succ, d.succ, s);
}

namespace {

void collectVars(const FmlPat& p, VarSet& v) {
  switch (p.k) {
    case FPatKind::AtomVar: v.atoms.insert(p.v1); break;
    case FPatKind::FmlVar:
    case FPatKind::Unary: v.formulas.insert(p.v1); break;
    case FPatKind::Binary:
      v.formulas.insert(p.v1);
      v.formulas.insert(p.v2);
      break;
    default: break;
  }
}

void collectVars(const StructPat& p, VarSet& v) {
  switch (p.k) {
    case SPatKind::StructVar: v.structs.insert(p.var); break;
    case SPatKind::Fml: collectVars(p.fml, v); break;
    case SPatKind::Star:
    case SPatKind::Bullet: collectVars(*p.a, v); break;
    case SPatKind::Comp:
      collectVars(*p.a, v);
      collectVars(*p.b, v);
      break;
    default: break;
  }
}

}  // namespace

VarSet DisplayRule::vars() const {
  VarSet v;
  for (auto& p : premises) {
    collectVars(p.ante, v);
    collectVars(p.succ, v);
  }
  collectVars(conclusion.ante, v);
  collectVars(conclusion.succ, v);
  return v;
}

namespace {

using SP = StructPat;

SP svX() { return SP::sv("X"); }
SP svY() { return SP::sv("Y"); }
SP svZ() { return SP::sv("Z"); }
SP svW() { return SP::sv("W"); }
SP fA() { return SP::leaf(FmlPat::fmlVar("A")); }
SP fB() { return SP::leaf(FmlPat::fmlVar("B")); }
SP sbs(SP x) { return SP::star(SP::bullet(SP::star(std::move(x)))); }

DisplayRule mk(std::string name, std::vector<SeqPat> prem, SeqPat con, bool reversible = false,
               bool initial = false) {
  DisplayRule r;
  r.name = std::move(name);
  r.premises = std::move(prem);
  r.conclusion = std::move(con);
  r.reversible = reversible;
  r.initial = initial;
  return r;
}

std::vector<DisplayRule> baseRules() {
  std::vector<DisplayRule> rs;
  SP I = SP::unit();
  SP top = SP::leaf(FmlPat::top()), bot = SP::leaf(FmlPat::bot());
  auto unA = [](Conn c) { return SP::leaf(FmlPat::un(c, "A")); };
  auto binAB = [](Conn c) { return SP::leaf(FmlPat::bin(c, "A", "B")); };
  SP atomP = SP::leaf(FmlPat::atomVar("p"));

  rs.push_back(mk("id", {}, {atomP, atomP}, false, true));
  rs.push_back(mk("top_r", {}, {I, top}, false, true));
  rs.push_back(mk("bot_l", {}, {bot, I}, false, true));
  rs.push_back(mk("top_l", {{I, svY()}}, {top, svY()}));
  rs.push_back(mk("bot_r", {{svX(), I}}, {svX(), bot}));
  rs.push_back(mk("neg_l", {{SP::star(fA()), svY()}}, {unA(Conn::Not), svY()}));
  rs.push_back(mk("neg_r", {{svX(), SP::star(fA())}}, {svX(), unA(Conn::Not)}));
  rs.push_back(mk("imp_l", {{svX(), fA()}, {fB(), svY()}},
                  {binAB(Conn::Imp), SP::comp(SP::star(svX()), svY())}));
  rs.push_back(mk("imp_r", {{SP::comp(svX(), fA()), fB()}}, {svX(), binAB(Conn::Imp)}));
  rs.push_back(mk("or_l", {{fA(), svY()}, {fB(), svY()}}, {binAB(Conn::Or), svY()}));
  rs.push_back(mk("or_r", {{svX(), SP::comp(fA(), fB())}}, {svX(), binAB(Conn::Or)}));
  rs.push_back(mk("and_l", {{SP::comp(fA(), fB()), svY()}}, {binAB(Conn::And), svY()}));
  rs.push_back(mk("and_r", {{svX(), fA()}, {svX(), fB()}}, {svX(), binAB(Conn::And)}));
  rs.push_back(mk("boxf_l", {{fA(), svY()}}, {unA(Conn::BoxF), SP::bullet(svY())}));
  rs.push_back(mk("boxf_r", {{SP::bullet(svX()), fA()}}, {svX(), unA(Conn::BoxF)}));
  rs.push_back(mk("diaf_l", {{fA(), sbs(svY())}}, {unA(Conn::DiaF), svY()}));
  rs.push_back(mk("diaf_r", {{svX(), fA()}}, {sbs(svX()), unA(Conn::DiaF)}));
  rs.push_back(mk("boxp_r", {{sbs(svX()), fA()}}, {svX(), unA(Conn::BoxP)}));
  rs.push_back(mk("boxp_l", {{fA(), svY()}}, {unA(Conn::BoxP), sbs(svY())}));
  rs.push_back(mk("diap_l", {{fA(), SP::bullet(svY())}}, {unA(Conn::DiaP), svY()}));
  rs.push_back(mk("diap_r", {{svX(), fA()}}, {SP::bullet(svX()), unA(Conn::DiaP)}));

  rs.push_back(mk("d1", {{SP::comp(svX(), svY()), svZ()}}, {svX(), SP::comp(svZ(), SP::star(svY()))}, true));
  rs.push_back(mk("d2", {{SP::comp(svX(), svY()), svZ()}}, {svY(), SP::comp(SP::star(svX()), svZ())}, true));
  rs.push_back(mk("d3", {{svX(), SP::comp(svY(), svZ())}}, {SP::comp(svX(), SP::star(svZ())), svY()}, true));
  rs.push_back(mk("d4", {{svX(), SP::comp(svY(), svZ())}}, {SP::comp(SP::star(svY()), svX()), svZ()}, true));
  rs.push_back(mk("d5", {{SP::star(svX()), svY()}}, {SP::star(svY()), svX()}, true));
  rs.push_back(mk("d6", {{svX(), SP::star(svY())}}, {svY(), SP::star(svX())}, true));
  rs.push_back(mk("d7", {{SP::star(SP::star(svX())), svY()}}, {svX(), svY()}, true));
  rs.push_back(mk("d8", {{svX(), SP::star(SP::star(svY()))}}, {svX(), svY()}, true));
  rs.push_back(mk("d9", {{svX(), SP::bullet(svY())}}, {SP::bullet(svX()), svY()}, true));

  rs.push_back(mk("Il", {{svX(), svY()}}, {SP::comp(I, svX()), svY()}, true));
  rs.push_back(mk("Ir", {{svX(), svY()}}, {svX(), SP::comp(I, svY())}, true));
  rs.push_back(mk("ql", {{I, svY()}}, {SP::star(I), svY()}, true));
  rs.push_back(mk("qr", {{svX(), I}}, {svX(), SP::star(I)}, true));
  rs.push_back(mk("wl", {{svX(), svY()}}, {SP::comp(svZ(), svX()), svY()}));
  rs.push_back(mk("wr", {{svX(), svY()}}, {svX(), SP::comp(svY(), svZ())}));
  rs.push_back(mk("al", {{SP::comp(svX(), SP::comp(svY(), svZ())), svW()}},
                  {SP::comp(SP::comp(svX(), svY()), svZ()), svW()}, true));
  rs.push_back(mk("ar", {{svX(), SP::comp(svY(), SP::comp(svZ(), svW()))}},
                  {svX(), SP::comp(SP::comp(svY(), svZ()), svW())}, true));
  rs.push_back(mk("pl", {{SP::comp(svX(), svY()), svZ()}}, {SP::comp(svY(), svX()), svZ()}));
  rs.push_back(mk("pr", {{svX(), SP::comp(svY(), svZ())}}, {svX(), SP::comp(svZ(), svY())}));
  rs.push_back(mk("cl", {{SP::comp(svX(), svX()), svY()}}, {svX(), svY()}));
  rs.push_back(mk("cr", {{svX(), SP::comp(svY(), svY())}}, {svX(), svY()}));
  rs.push_back(mk("ml", {{I, svY()}}, {SP::bullet(I), svY()}));
  rs.push_back(mk("mr", {{svX(), I}}, {svX(), SP::bullet(I)}));
  rs.push_back(mk("cut", {{svX(), fA()}, {fA(), svY()}}, {svX(), svY()}));
  return rs;
}

}  // namespace

StructPat psi(const Formula& f) {
  switch (f.kind()) {
    case Conn::Top: return StructPat::unit();
    case Conn::Atom: return StructPat::sv("X_" + f.atomName());
    case Conn::And: return StructPat::comp(psi(f.left()), psi(f.right()));
    case Conn::DiaF: return sbs(psi(f.child()));
    case Conn::DiaP: return StructPat::bullet(psi(f.child()));
    default: throw std::invalid_argument("psi: " + f.str() + " is not in the primitive sublanguage");
  }
}

DisplayRule makeDisplayRule(const PrimitiveAxiom& ax, int index) {
  DisplayRule r;
  r.name = "pt:" + std::to_string(index);
  r.isPt = true;
  r.axiomIndex = index;
  StructPat ctx = StructPat::sv("X");
  for (auto& b : ax.succedents) r.premises.push_back({psi(b), ctx});
  r.conclusion = {psi(ax.antecedent), ctx};
  return r;
}

std::vector<DisplayRule> makeDisplayRules(const std::vector<PrimitiveAxiom>& axioms) {
  std::vector<DisplayRule> out;
  for (size_t i = 0; i < axioms.size(); ++i) out.push_back(makeDisplayRule(axioms[i], int(i)));
  return out;
}

DisplayCalculus::DisplayCalculus(const std::vector<PrimitiveAxiom>& axioms) : axioms_(axioms) {
  rules_ = baseRules();
  for (auto& r : makeDisplayRules(axioms)) rules_.push_back(r);
  for (size_t i = 0; i < rules_.size(); ++i) byName_[rules_[i].name] = i;
}

const DisplayRule* DisplayCalculus::find(const std::string& name) const {
  auto it = byName_.find(name);
  return it == byName_.end() ? nullptr : &rules_[it->second];
}

int DisplayProof::quantity() const {
  int q = 1;
  for (auto& p : premises) q += p.quantity();
  return q;
}

int DisplayProof::width() const {
  int w = conclusion.length();
  for (auto& p : premises) w = std::max(w, p.width());
  return w;
}

ProofMetrics displayMetrics(const DisplayProof& p) {
  return {p.quantity(), p.width(), p.size()};
}

std::string CheckResult::pathStr() const {
  std::string s = "root";
  for (int i : path) s += "." + std::to_string(i);
  return s;
}

namespace {

CheckResult fail(std::vector<int> path, std::string msg) {
  CheckResult r;
  r.ok = false;
  r.path = std::move(path);
  r.message = std::move(msg);
  return r;
}

}  // namespace

CheckResult checkInstance(const DisplayCalculus& calc, const DisplayRule& rule, bool up, DisplaySubst sub,
                          const DisplaySequent& conclusion, const std::vector<DisplaySequent>& premises) {
  (void)calc;
  if (up && !rule.reversible) return fail({}, "rule " + rule.name + " is not reversible");
  const SeqPat* conPat = &rule.conclusion;
  std::vector<const SeqPat*> premPats;
  for (auto& p : rule.premises) premPats.push_back(&p);
  if (up) {
    if (rule.premises.size() != 1) return fail({}, "only single-premise rules can be applied upward");
    conPat = &rule.premises[0];
    premPats = {&rule.conclusion};
  }
  if (premises.size() != premPats.size())
    return fail({}, "rule " + rule.name + " expects " + std::to_string(premPats.size()) + " premises, got " +
                        std::to_string(premises.size()));

  // Infer missing bindings by matching (explicit bindings are kept and must
  // agree). pt rules carry inherently ambiguous schematic antecedents, so they
  // must come with a full substitution.
  VarSet vars = rule.vars();
  auto total = [&](const DisplaySubst& s) {
    for (auto& v : vars.atoms)
      if (!s.atoms.count(v)) return false;
    for (auto& v : vars.formulas)
      if (!s.formulas.count(v)) return false;
    for (auto& v : vars.structs)
      if (!s.structs.count(v)) return false;
    return true;
  };
  if (!total(sub)) {
    if (rule.isPt) return fail({}, "pt rules require an explicit, total substitution");
    if (!match(*conPat, conclusion, sub))
      return fail({}, "conclusion does not match rule " + rule.name);
    for (size_t i = 0; i < premises.size() && !total(sub); ++i)
      if (!match(*premPats[i], premises[i], sub))
        return fail({}, "premise " + std::to_string(i) + " does not match rule " + rule.name);
    if (!total(sub)) return fail({}, "could not infer a total substitution for rule " + rule.name);
  }

  DisplaySequent wantCon = instantiate(*conPat, sub);
  if (!(wantCon == conclusion))
    return fail({}, "conclusion mismatch for " + rule.name + ": expected '" + wantCon.str() + "', found '" +
                        conclusion.str() + "'");
  for (size_t i = 0; i < premises.size(); ++i) {
    DisplaySequent want = instantiate(*premPats[i], sub);
    if (!(want == premises[i]))
      return fail({}, "premise " + std::to_string(i) + " mismatch for " + rule.name + ": expected '" +
                          want.str() + "', found '" + premises[i].str() + "'");
  }
  return {};
}

namespace {

CheckResult checkNode(const DisplayCalculus& calc, const DisplayProof& p, const CheckOptions& opt,
                      std::vector<int>& path) {
  if (p.rule == "hyp") {
    for (auto& h : opt.hypotheses)
      if (h == p.conclusion) return {};
    return fail(path, "hypothesis leaf '" + p.conclusion.str() + "' is not among the allowed open premises");
  }
  const DisplayRule* rule = calc.find(p.rule);
  if (!rule) return fail(path, "unknown rule " + p.rule);
  if (rule->name == "cut" && !opt.allowCut) return fail(path, "cut is not allowed here");
  std::vector<DisplaySequent> prems;
  for (auto& q : p.premises) prems.push_back(q.conclusion);
  CheckResult r = checkInstance(calc, *rule, p.up, p.sub, p.conclusion, prems);
  if (!r.ok) {
    r.path = path;
    return r;
  }
  for (size_t i = 0; i < p.premises.size(); ++i) {
    path.push_back(int(i));
    CheckResult cr = checkNode(calc, p.premises[i], opt, path);
    if (!cr.ok) return cr;
    path.pop_back();
  }
  return {};
}

}  // namespace

CheckResult checkDisplayProof(const DisplayCalculus& calc, const DisplayProof& p, const CheckOptions& opt) {
  std::vector<int> path;
  return checkNode(calc, p, opt, path);
}

namespace {

nlohmann::json substToJson(const DisplaySubst& s) {
  nlohmann::json j = nlohmann::json::object();
  for (auto& [k, v] : s.atoms) j[k] = v;
  for (auto& [k, v] : s.formulas) j[k] = v.str();
  for (auto& [k, v] : s.structs) j[k] = v.str();
  return j;
}

nlohmann::json proofToJson(const DisplayProof& p) {
  nlohmann::json j;
  j["rule"] = p.rule;
  if (p.up) j["dir"] = "up";
  if (!p.sub.atoms.empty() || !p.sub.formulas.empty() || !p.sub.structs.empty())
    j["subst"] = substToJson(p.sub);
  j["conclusion"] = p.conclusion.str();
  auto arr = nlohmann::json::array();
  for (auto& q : p.premises) arr.push_back(proofToJson(q));
  j["premises"] = arr;
  return j;
}

DisplayProof proofFromJson(const nlohmann::json& j, const DisplayCalculus& calc) {
  DisplayProof p;
  p.rule = j.at("rule").get<std::string>();
  if (j.contains("dir")) {
    std::string d = j["dir"].get<std::string>();
    if (d != "up" && d != "down") throw std::invalid_argument("dir must be 'up' or 'down'");
    p.up = d == "up";
  }
  p.conclusion = parseDisplaySequent(j.at("conclusion").get<std::string>());
  if (j.contains("subst")) {
    const DisplayRule* rule = calc.find(p.rule);
    VarSet vars = rule ? rule->vars() : VarSet{};
    for (auto& [k, v] : j["subst"].items()) {
      std::string text = v.get<std::string>();
      if (vars.atoms.count(k))
        p.sub.atoms[k] = text;
      else if (vars.formulas.count(k))
        p.sub.formulas[k] = parseFormula(text);
      else
        p.sub.structs[k] = parseStruct(text);
    }
  }
  if (j.contains("premises"))
    for (auto& q : j["premises"]) p.premises.push_back(proofFromJson(q, calc));
  return p;
}

}  // namespace

std::string displayProofToJson(const DisplayProof& p, const DisplayCalculus& calc,
                               const std::vector<Formula>* axiomFormulas) {
  nlohmann::json j;
  j["calculus"] = "DKtP";
  auto axs = nlohmann::json::array();
  if (axiomFormulas) {
    for (auto& a : *axiomFormulas) axs.push_back(a.str());
  } else {
    for (auto& a : calc.axioms()) axs.push_back(a.str());
  }
  j["axioms"] = axs;
  j["proof"] = proofToJson(p);
  return j.dump(2);
}

DisplayProof displayProofFromJson(const std::string& text, const DisplayCalculus& calc) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.contains("proof")) return proofFromJson(j["proof"], calc);
  return proofFromJson(j, calc);
}

std::vector<Formula> proofFileAxioms(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<Formula> out;
  if (j.contains("axioms"))
    for (auto& a : j["axioms"]) out.push_back(parseFormula(a.get<std::string>()));
  return out;
}

}  // namespace tpk
