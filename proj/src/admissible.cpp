#include "tpk/admissible.hpp"

#include <algorithm>
#include <functional>

#include "tpk/notation.hpp"

namespace tpk {

namespace {

void collectLabels(const LabeledProof& p, std::set<Label>& out) {
  for (auto& l : p.conclusion.labels()) out.insert(l);
  for (auto& [k, v] : p.sub.labels) out.insert(v);
  for (auto& [k, s] : p.sub.seqs)
    for (auto& l : s.labels()) out.insert(l);
  for (auto& q : p.premises) collectLabels(q, out);
}

LabeledProof mapLabels(const LabeledProof& p, const std::map<Label, Label>& m) {
  auto ren = [&](const Label& l) {
    auto it = m.find(l);
    return it == m.end() ? l : it->second;
  };
  LabeledProof out;
  out.rule = p.rule;
  out.conclusion = renameLabels(p.conclusion, m);
  out.sub = p.sub;
  for (auto& [k, v] : out.sub.labels) v = ren(v);
  for (auto& [k, s] : out.sub.seqs) s = renameLabels(s, m);
  for (auto& q : p.premises) out.premises.push_back(mapLabels(q, m));
  return out;
}

// Verifies a rebuilt node against its children; transformations call this to
// fail fast instead of producing silently broken proofs.
void verifyNode(const LabeledCalculus& calc, const LabeledProof& node) {
  LabeledCheckOptions opt;
  opt.allowStructural = false;
  CheckResult r = checkLabeledInstance(calc, calc.find(node.rule), node, opt);
  if (!r.ok)
    throw std::logic_error("admissible transformation produced an invalid " + node.rule +
                           " node: " + r.message);
}

struct Ctx {
  const LabeledCalculus& calc;
  LabelAllocator alloc;
};

Label freshLabel(Ctx& cx) { return cx.alloc.fresh(); }

LabeledSequent freshCopy(Ctx& cx, const LabeledSequent& s, const std::map<Label, Label>& pin) {
  std::map<Label, Label> m = pin;
  for (auto& l : s.labels())
    if (!m.count(l)) m[l] = freshLabel(cx);
  return renameLabels(s, m);
}

// ---------------------------------------------------------------------------
// structure of a pt node

struct PtView {
  const LabeledRule* rule;
  Label root;
  std::map<Label, std::string> images;          // label -> rule label variable
  std::vector<std::string> annNames;            // all annotated variable names
  // partners[name] = annotated variables with the same atom, per premise index
  std::map<std::string, std::vector<std::pair<int, std::string>>> partners;
};

PtView ptView(const LabeledRule& rule, const LabeledSubst& sub) {
  PtView v;
  v.rule = &rule;
  v.root = sub.labels.at(rule.rootVar);
  for (auto& lv : rule.vars().labels) v.images[sub.labels.at(lv)] = lv;
  for (auto& [n, a] : rule.annvars) v.annNames.push_back(n);
  for (auto& [n, a] : rule.annvars) {
    for (int j = 0; j < int(rule.bParts.size()); ++j)
      for (auto& other : rule.bParts[j].annvars)
        if (other != n && rule.annvars.at(other).atom == a.atom) v.partners[n].push_back({j, other});
  }
  return v;
}

// Which annotated variable's instantiation mentions l (excluding bare images).
std::optional<std::string> varHolding(const LabeledRule& rule, const LabeledSubst& sub, const Label& l) {
  for (auto& [n, a] : rule.annvars) {
    auto it = sub.seqs.find(n);
    if (it != sub.seqs.end() && it->second.labels().count(l)) return n;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// weakening

LabeledProof weakenRec(Ctx& cx, const LabeledProof& p, std::vector<LabeledSequent> extras);

LabeledProof rebuilt(Ctx& cx, LabeledProof node) {
  verifyNode(cx.calc, node);
  return node;
}

LabeledProof weakenRec(Ctx& cx, const LabeledProof& p, std::vector<LabeledSequent> extras) {
  extras.erase(std::remove_if(extras.begin(), extras.end(),
                              [](const LabeledSequent& s) { return s.isEmpty(); }),
               extras.end());
  if (extras.empty()) return p;
  const LabeledRule* rule = cx.calc.find(p.rule);
  if (!rule) throw std::logic_error("weaken: unknown rule " + p.rule);
  LabeledProof out = p;
  for (auto& e : extras) out.conclusion = compose(out.conclusion, e);

  if (!rule->isPt) {
    for (auto& e : extras) out.sub.seqs.at("S") = compose(out.sub.seqs.at("S"), e);
    out.premises.clear();
    for (auto& q : p.premises) out.premises.push_back(weakenRec(cx, q, extras));
    return rebuilt(cx, std::move(out));
  }

  PtView v = ptView(*rule, p.sub);
  std::vector<std::vector<LabeledSequent>> premExtras(p.premises.size(), extras);
  for (auto& e : extras) {
    std::set<Label> attach;
    for (auto& l : e.labels())
      if (p.conclusion.labels().count(l)) attach.insert(l);
    if (attach.size() > 1) throw std::logic_error("weaken: extra overlaps the host in several labels");
    Label a = attach.empty() ? Label() : *attach.begin();
    bool toContext = attach.empty() || a == v.root || p.sub.seqs.at(rule->contextVar).labels().count(a);
    if (toContext) {
      out.sub.seqs.at(rule->contextVar) = compose(out.sub.seqs.at(rule->contextVar), e);
      continue;
    }
    auto holder = varHolding(*rule, p.sub, a);
    if (!holder) {
      if (v.images.count(a))
        throw NonEliminable("weakening attaches at the bare schematic label " + a +
                            " which carries no annotated variable");
      throw std::logic_error("weaken: attach label " + a + " not found in the instance");
    }
    out.sub.seqs.at(*holder) = compose(out.sub.seqs.at(*holder), e);
    // keep P2: every partner in a premise receives a fresh isomorphic copy
    for (auto& [j, partner] : v.partners[*holder]) {
      auto iso = isomorphism(p.sub.seqs.at(*holder), p.sub.seqs.at(partner));
      if (!iso) throw std::logic_error("weaken: P2 partners are not isomorphic");
      LabeledSequent copy = freshCopy(cx, e, {{a, iso->at(a)}});
      premExtras[j].push_back(copy);
    }
  }
  out.premises.clear();
  for (size_t j = 0; j < p.premises.size(); ++j)
    out.premises.push_back(weakenRec(cx, p.premises[j], premExtras[j]));
  return rebuilt(cx, std::move(out));
}

// ---------------------------------------------------------------------------
// label substitution

LabeledProof substRec(Ctx& cx, const LabeledProof& p, const Label& keep, const Label& merge);

LabeledSubst substEverywhere(const LabeledSubst& sub, const Label& keep, const Label& merge) {
  LabeledSubst out = sub;
  for (auto& [k, v] : out.labels)
    if (v == merge) v = keep;
  for (auto& [k, s] : out.seqs) s = labelSubstitute(s, merge, keep);
  return out;
}

enum class Place { Image, InVar, Context };

Place placeOf(const PtView& v, const LabeledRule& rule, const LabeledSubst& sub, const Label& l,
              std::string* var) {
  if (v.images.count(l)) return Place::Image;
  if (auto h = varHolding(rule, sub, l)) {
    if (var) *var = *h;
    return Place::InVar;
  }
  return Place::Context;
}

// Aligns a freshly contracted rule against the stored closure member with the
// same canonical form. Returns the stored rule plus a map from the stored
// rule's A-part label variables to the candidate's.
struct RuleAlignment {
  const LabeledRule* stored = nullptr;
  std::map<std::string, std::string> storedToCand;            // label vars
  std::map<std::string, std::string> storedAnnToCand;         // annotated var names
};

std::string componentKey(const LabeledRule& r, const PtComponent& c,
                         const std::map<std::string, std::string>& ren) {
  auto rn = [&](const std::string& x) {
    auto it = ren.find(x);
    return it == ren.end() ? x : it->second;
  };
  std::vector<std::string> rel;
  for (auto& e : c.rel) rel.push_back(rn(e.from) + ">" + rn(e.to));
  std::sort(rel.begin(), rel.end());
  std::vector<std::string> ann;
  for (auto& n : c.annvars) ann.push_back(r.annvars.at(n).atom + "@" + rn(r.annvars.at(n).lab));
  std::sort(ann.begin(), ann.end());
  std::string out;
  for (auto& s : rel) out += s + ",";
  out += ";";
  for (auto& s : ann) out += s + ",";
  return out;
}

std::optional<std::map<std::string, std::string>> alignVars(const LabeledRule& stored,
                                                            const LabeledRule& cand) {
  std::vector<std::string> sv(stored.aPart.labelVars.begin(), stored.aPart.labelVars.end());
  std::vector<std::string> cvAll(cand.aPart.labelVars.begin(), cand.aPart.labelVars.end());
  if (sv.size() != cvAll.size() || stored.bParts.size() != cand.bParts.size()) return std::nullopt;
  std::sort(cvAll.begin(), cvAll.end());
  std::vector<std::string> perm = cvAll;
  do {
    std::map<std::string, std::string> ren;  // stored var -> cand var
    std::sort(sv.begin(), sv.end());
    bool ok = sv.size() == perm.size();
    for (size_t i = 0; ok && i < sv.size(); ++i) ren[sv[i]] = perm[i];
    if (!ok) break;
    if (ren.count(stored.rootVar) ? ren[stored.rootVar] != cand.rootVar
                                  : stored.rootVar != cand.rootVar)
      continue;
    if (componentKey(stored, stored.aPart, ren) != componentKey(cand, cand.aPart, {})) continue;
    bool all = true;
    for (size_t j = 0; j < stored.bParts.size(); ++j)
      if (componentKey(stored, stored.bParts[j], ren) != componentKey(cand, cand.bParts[j], {})) {
        all = false;
        break;
      }
    if (all) return ren;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

RuleAlignment findContraction(const LabeledCalculus& calc, const LabeledRule& cand) {
  RuleAlignment out;
  for (auto* r : calc.ptClosure(cand.axiomIndex)) {
    auto m = alignVars(*r, cand);
    if (!m) continue;
    out.stored = r;
    out.storedToCand = *m;
    // align annotated variables by (atom, mapped annotation), positionally
    // within groups; grouped duplicates are interchangeable
    auto annKey = [&](const LabeledRule& rr, const std::string& n,
                      const std::map<std::string, std::string>& ren) {
      auto& a = rr.annvars.at(n);
      auto it = ren.find(a.lab);
      return a.atom + "@" + (it == ren.end() ? a.lab : it->second);
    };
    auto group = [&](const LabeledRule& rr, const std::vector<std::string>& names,
                     const std::map<std::string, std::string>& ren) {
      std::map<std::string, std::vector<std::string>> g;
      for (auto& n : names) g[annKey(rr, n, ren)].push_back(n);
      return g;
    };
    auto alignComponent = [&](const PtComponent& sc, const PtComponent& cc) {
      auto gs = group(*r, sc.annvars, out.storedToCand);
      auto gc = group(cand, cc.annvars, {});
      for (auto& [key, names] : gs) {
        auto& cnames = gc[key];
        if (cnames.size() != names.size()) throw std::logic_error("contraction alignment mismatch");
        for (size_t i = 0; i < names.size(); ++i) out.storedAnnToCand[names[i]] = cnames[i];
      }
    };
    alignComponent(r->aPart, cand.aPart);
    for (size_t j = 0; j < r->bParts.size(); ++j) alignComponent(r->bParts[j], cand.bParts[j]);
    return out;
  }
  throw std::logic_error("contraction rule not found in the closure");
}

// Builds the candidate contraction of `rule` identifying mergeVar into
// keepVar and deleting one duplicate relational atom.
LabeledRule contractCandidate(const LabeledRule& rule, const std::string& keepVar,
                              const std::string& mergeVar) {
  // reuse the construction from the closure generator: substitute, locate a
  // duplicate, delete it
  LabeledRule s = rule;
  {
    auto rn = [&](const std::string& x) { return x == mergeVar ? keepVar : x; };
    LabeledRule t = s;
    t.rootVar = rn(s.rootVar);
    auto subComp = [&](const PtComponent& c) {
      PtComponent o;
      for (auto& e : c.rel) o.rel.push_back({rn(e.from), rn(e.to)});
      o.annvars = c.annvars;
      for (auto& x : c.labelVars) o.labelVars.insert(rn(x));
      return o;
    };
    t.aPart = subComp(s.aPart);
    t.bParts.clear();
    for (auto& b : s.bParts) t.bParts.push_back(subComp(b));
    t.annvars.clear();
    for (auto& [n, a] : s.annvars) t.annvars[n] = AnnVar{a.name, a.atom, rn(a.lab)};
    s = t;
  }
  for (size_t i = 0; i < s.aPart.rel.size(); ++i)
    for (size_t j = i + 1; j < s.aPart.rel.size(); ++j)
      if (s.aPart.rel[i] == s.aPart.rel[j]) {
        s.aPart.rel.erase(s.aPart.rel.begin() + j);
        goto done;
      }
  throw NonEliminable("identifying " + mergeVar + " with " + keepVar +
                      " creates no duplicate relational atom");
done:
  // rebuild premises/conclusion from the components
  {
    LabeledRule rebuilt = s;
    rebuilt.premises.clear();
    rebuilt.conclusion = LabSeqPat{};
    LabSeqPat con;
    con.rel = s.aPart.rel;
    con.seqvars = s.aPart.annvars;
    con.seqvars.push_back(s.contextVar);
    rebuilt.conclusion = con;
    std::set<std::string> conVars = s.aPart.labelVars;
    conVars.insert(s.rootVar);
    rebuilt.freshVars.clear();
    for (auto& b : s.bParts) {
      LabSeqPat prem;
      prem.rel = s.aPart.rel;
      prem.rel.insert(prem.rel.end(), b.rel.begin(), b.rel.end());
      prem.seqvars = s.aPart.annvars;
      prem.seqvars.insert(prem.seqvars.end(), b.annvars.begin(), b.annvars.end());
      prem.seqvars.push_back(s.contextVar);
      rebuilt.premises.push_back(prem);
      std::set<std::string> annLabs;
      for (auto& n : b.annvars) annLabs.insert(s.annvars.at(n).lab);
      for (auto& x : b.labelVars)
        if (!conVars.count(x) && !annLabs.count(x)) rebuilt.freshVars.push_back(x);
    }
    return rebuilt;
  }
}

LabeledProof substRec(Ctx& cx, const LabeledProof& p, const Label& keep, const Label& merge) {
  if (keep == merge || !p.conclusion.labels().count(merge)) return p;
  const LabeledRule* rule = cx.calc.find(p.rule);
  if (!rule) throw std::logic_error("subst: unknown rule " + p.rule);
  LabeledProof out;
  out.rule = p.rule;
  out.conclusion = labelSubstitute(p.conclusion, merge, keep);

  if (!rule->isPt) {
    out.sub = substEverywhere(p.sub, keep, merge);
    for (auto& q : p.premises) out.premises.push_back(substRec(cx, q, keep, merge));
    return rebuilt(cx, std::move(out));
  }

  PtView v = ptView(*rule, p.sub);
  std::string varK, varM;
  Place pk = placeOf(v, *rule, p.sub, keep, &varK);
  Place pm = placeOf(v, *rule, p.sub, merge, &varM);

  auto plain = [&]() {
    out.sub = substEverywhere(p.sub, keep, merge);
    for (auto& q : p.premises) out.premises.push_back(substRec(cx, q, keep, merge));
    return rebuilt(cx, std::move(out));
  };

  // both in the context (the root never merges away: it is an image)
  if (pm == Place::Context && pk != Place::InVar) {
    if (pk == Place::Context || keep == v.root) return plain();
    // keep is a non-root image: the context's merge subtree lands on a
    // schematic label; it must be absorbed by an annotated variable there
    std::string target;
    for (auto& [n, a] : rule->annvars)
      if (p.sub.labels.at(a.lab) == keep) {
        bool inConclusion = false;
        for (auto& cn : rule->aPart.annvars) inConclusion |= cn == n;
        if (inConclusion) target = n;
      }
    if (target.empty())
      throw NonEliminable("ls merges context material onto the bare schematic label " + keep);
    const LabeledSequent& ctx0 = p.sub.seqs.at(rule->contextVar);
    LabeledSequent subtree = subpolytree(ctx0, merge, v.root);
    LabeledSequent rest = ctx0;
    for (auto& r : subtree.rel) rest.rel.erase(r);
    rest.rel.erase({v.root, merge});
    rest.rel.erase({merge, v.root});
    for (auto& x : subtree.ante) rest.removeAnte(x.lab, x.fml);
    for (auto& x : subtree.succ) rest.removeSucc(x.lab, x.fml);
    LabeledSequent moved = labelSubstitute(subtree, merge, keep);
    out.sub = substEverywhere(p.sub, keep, merge);
    out.sub.seqs.at(rule->contextVar) = rest;
    out.sub.seqs.at(target) = compose(labelSubstitute(p.sub.seqs.at(target), merge, keep), moved);
    for (size_t j = 0; j < p.premises.size(); ++j) {
      LabeledProof q = substRec(cx, p.premises[j], keep, merge);
      std::vector<LabeledSequent> copies;
      for (auto& [jj, partner] : v.partners[target]) {
        if (jj != int(j)) continue;
        // `moved` attaches at the annotation label; pin it to the partner's
        LabeledSequent copy =
            freshCopy(cx, moved, {{keep, p.sub.labels.at(rule->annvars.at(partner).lab)}});
        out.sub.seqs.at(partner) = compose(out.sub.seqs.at(partner), copy);
        copies.push_back(copy);
      }
      out.premises.push_back(weakenRec(cx, q, copies));
    }
    return rebuilt(cx, std::move(out));
  }

  if (pm == Place::InVar && pk == Place::InVar) {
    if (varK != varM) throw NonEliminable("ls merges across two annotated variables");
    // inside one annotated variable; mirror the identification in partners
    out.sub = substEverywhere(p.sub, keep, merge);
    for (size_t j = 0; j < p.premises.size(); ++j) {
      LabeledProof q = substRec(cx, p.premises[j], keep, merge);
      for (auto& [jj, partner] : v.partners[varM]) {
        if (jj != int(j)) continue;
        auto iso = isomorphism(p.sub.seqs.at(varM), p.sub.seqs.at(partner));
        if (!iso) throw std::logic_error("subst: P2 partners not isomorphic");
        q = substRec(cx, q, iso->at(keep), iso->at(merge));
        out.sub.seqs.at(partner) =
            labelSubstitute(out.sub.seqs.at(partner), iso->at(merge), iso->at(keep));
      }
      out.premises.push_back(std::move(q));
    }
    return rebuilt(cx, std::move(out));
  }

  if (pm == Place::InVar && pk == Place::Context) {
    // merge sits inside a variable annotated at the root; the context's keep
    // subtree moves into that variable
    const LabeledSequent& ctx0 = p.sub.seqs.at(rule->contextVar);
    LabeledSequent subtree = subpolytree(ctx0, keep, v.root);
    LabeledSequent rest = ctx0;
    for (auto& r : subtree.rel) rest.rel.erase(r);
    rest.rel.erase({v.root, keep});
    rest.rel.erase({keep, v.root});
    for (auto& x : subtree.ante) rest.removeAnte(x.lab, x.fml);
    for (auto& x : subtree.succ) rest.removeSucc(x.lab, x.fml);
    // the edge root->keep (or keep->root) moves with the subtree
    LabeledSequent movedEdge;
    if (ctx0.rel.count({v.root, keep})) movedEdge.addRel(v.root, keep);
    if (ctx0.rel.count({keep, v.root})) movedEdge.addRel(keep, v.root);
    LabeledSequent moved = compose(subtree, movedEdge);
    out.sub = substEverywhere(p.sub, keep, merge);
    out.sub.seqs.at(rule->contextVar) = rest;
    out.sub.seqs.at(varM) = compose(labelSubstitute(p.sub.seqs.at(varM), merge, keep), moved);
    for (size_t j = 0; j < p.premises.size(); ++j) {
      LabeledProof q = substRec(cx, p.premises[j], keep, merge);
      std::vector<LabeledSequent> copies;
      for (auto& [jj, partner] : v.partners[varM]) {
        if (jj != int(j)) continue;
        auto iso = isomorphism(p.sub.seqs.at(varM), p.sub.seqs.at(partner));
        if (!iso) throw std::logic_error("subst: P2 partners not isomorphic");
        std::map<Label, Label> pin{{keep, iso->at(merge)},
                                   {v.root, p.sub.labels.at(rule->annvars.at(partner).lab)}};
        LabeledSequent copy = freshCopy(cx, moved, pin);
        out.sub.seqs.at(partner) = compose(out.sub.seqs.at(partner), copy);
        copies.push_back(copy);
      }
      out.premises.push_back(weakenRec(cx, q, copies));
    }
    return rebuilt(cx, std::move(out));
  }

  if (pm == Place::InVar && pk == Place::Image) {
    // the variable's internal subtree is renamed onto a schematic label
    for (auto& [n, a] : rule->annvars)
      if (p.sub.labels.at(a.lab) == keep)
        throw NonEliminable("ls merges variable material onto the annotated label " + keep);
    return plain();
  }
  if (pm == Place::Image && pk == Place::InVar) {
    LabeledProof flipped = substRec(cx, p, merge, keep);
    return mapLabels(flipped, {{merge, keep}});
  }

  if (pm == Place::Image && pk == Place::Image) {
    // switch to the contraction of the rule that identifies the two schema
    // variables
    std::string keepVar = v.images.at(keep), mergeVar = v.images.at(merge);
    LabeledRule cand = contractCandidate(*rule, keepVar, mergeVar);
    RuleAlignment al = findContraction(cx.calc, cand);
    out.rule = al.stored->name;
    LabeledSubst sc;
    LabeledSubst old = substEverywhere(p.sub, keep, merge);
    for (auto& lv : al.stored->vars().labels) {
      std::string cv = al.storedToCand.count(lv) ? al.storedToCand.at(lv) : lv;
      sc.labels[lv] = old.labels.at(cv);
    }
    for (auto& [sn, an] : al.stored->annvars) {
      std::string cn = al.storedAnnToCand.count(sn) ? al.storedAnnToCand.at(sn) : sn;
      sc.seqs[sn] = old.seqs.at(cn);
    }
    sc.seqs[al.stored->contextVar] = old.seqs.at(rule->contextVar);
    out.sub = sc;
    for (auto& q : p.premises) out.premises.push_back(substRec(cx, q, keep, merge));
    return rebuilt(cx, std::move(out));
  }

  if (pm == Place::Context && pk == Place::InVar) {
    LabeledProof flipped = substRec(cx, p, merge, keep);
    return mapLabels(flipped, {{merge, keep}});
  }
  if (pm == Place::Image && pk == Place::Context) {
    LabeledProof flipped = substRec(cx, p, merge, keep);
    return mapLabels(flipped, {{merge, keep}});
  }
  throw std::logic_error("subst: unhandled placement combination");
}

// ---------------------------------------------------------------------------
// inversions

struct InvMode {
  Conn conn;
  bool left;      // side of the inverted occurrence
  int variant;    // 1 or 2 for rules with two premises
  Formula f;      // the occurrence
  Formula a, b2;  // components
  Label fresh;    // witness label for modal inversions
};

// Material the inversion puts in place of the occurrence at label w.
LabeledSequent invMaterial(const InvMode& m, const Label& w) {
  LabeledSequent s;
  switch (m.conn) {
    case Conn::Not:
      if (m.left)
        s.addSucc(w, m.a);
      else
        s.addAnte(w, m.a);
      break;
    case Conn::And:
      if (m.left) {
        s.addAnte(w, m.a);
        s.addAnte(w, m.b2);
      } else {
        s.addSucc(w, m.variant == 1 ? m.a : m.b2);
      }
      break;
    case Conn::Or:
      if (m.left) {
        s.addAnte(w, m.variant == 1 ? m.a : m.b2);
      } else {
        s.addSucc(w, m.a);
        s.addSucc(w, m.b2);
      }
      break;
    case Conn::Imp:
      if (m.left) {
        if (m.variant == 1)
          s.addSucc(w, m.a);
        else
          s.addAnte(w, m.b2);
      } else {
        s.addAnte(w, m.a);
        s.addSucc(w, m.b2);
      }
      break;
    case Conn::DiaF:
      s.addRel(w, m.fresh);
      s.addAnte(m.fresh, m.a);
      break;
    case Conn::DiaP:
      s.addRel(m.fresh, w);
      s.addAnte(m.fresh, m.a);
      break;
    case Conn::BoxF:
      s.addRel(w, m.fresh);
      s.addSucc(m.fresh, m.a);
      break;
    case Conn::BoxP:
      s.addRel(m.fresh, w);
      s.addSucc(m.fresh, m.a);
      break;
    default: throw std::logic_error("invMaterial");
  }
  return s;
}

LabeledSequent invReplace(const InvMode& m, const LabeledSequent& s, const Label& w) {
  LabeledSequent out = s;
  bool removed = m.left ? out.removeAnte(w, m.f) : out.removeSucc(w, m.f);
  if (!removed) throw std::logic_error("inversion: occurrence not present");
  return compose(out, invMaterial(m, w));
}

// The rule that consumes an occurrence of m.f on m.left as its principal.
std::string principalRuleOf(const InvMode& m) {
  switch (m.conn) {
    case Conn::Not: return m.left ? "neg_l" : "neg_r";
    case Conn::And: return m.left ? "and_l" : "and_r";
    case Conn::Or: return m.left ? "or_l" : "or_r";
    case Conn::Imp: return m.left ? "imp_l" : "imp_r";
    case Conn::DiaF: return "diaf_l";
    case Conn::DiaP: return "diap_l";
    case Conn::BoxF: return "boxf_r";
    case Conn::BoxP: return "boxp_r";
    default: throw std::logic_error("principalRuleOf");
  }
}

LabeledProof contractRec(Ctx& cx, const LabeledProof& p, const Label& w, const Formula& f, bool left);

LabeledProof invertRec(Ctx& cx, const LabeledProof& p, const Label& w, const InvMode& m) {
  const LabeledRule* rule = cx.calc.find(p.rule);
  if (!rule) throw std::logic_error("invert: unknown rule " + p.rule);

  // Is the occurrence this node's principal?
  if (p.rule == principalRuleOf(m) && p.sub.labels.at("w") == w &&
      instantiate(rule->conclusion.fmls[0].fml,
                  DisplaySubst{p.sub.atoms, p.sub.formulas, {}}) == m.f) {
    if (m.conn == Conn::And || (m.conn == Conn::Or && !m.left) || (m.conn == Conn::Imp && !m.left) ||
        m.conn == Conn::Not) {
      int idx = 0;
      if (!m.left && m.conn == Conn::And) idx = m.variant - 1;
      return p.premises[idx];
    }
    if ((m.conn == Conn::Or && m.left) || (m.conn == Conn::Imp && m.left)) {
      return p.premises[m.variant - 1];
    }
    // modal: rename the witness to the requested fresh label
    Label witness = p.sub.labels.at("u");
    std::set<Label> avoid;
    collectLabels(p.premises[0], avoid);
    avoid.insert(m.fresh);
    return renameProof(cx.calc, p.premises[0], {{witness, m.fresh}}, avoid);
  }

  LabeledProof out = p;
  out.conclusion = invReplace(m, p.conclusion, w);

  if (!rule->isPt) {
    // the occurrence lives in the context
    LabeledSequent& s = out.sub.seqs.at("S");
    s = invReplace(m, s, w);
    out.premises.clear();
    for (auto& q : p.premises) out.premises.push_back(invertRec(cx, q, w, m));
    return rebuilt(cx, std::move(out));
  }

  PtView v = ptView(*rule, p.sub);
  // locate the copy: in the context or inside an annotated variable
  const LabeledSequent& ctx0 = p.sub.seqs.at(rule->contextVar);
  bool inCtx = m.left ? ctx0.countAnte(w, m.f) > 0 : ctx0.countSucc(w, m.f) > 0;
  if (inCtx) {
    out.sub.seqs.at(rule->contextVar) = invReplace(m, ctx0, w);
    out.premises.clear();
    for (auto& q : p.premises) out.premises.push_back(invertRec(cx, q, w, m));
    return rebuilt(cx, std::move(out));
  }
  std::string holder;
  for (auto& [n, a] : rule->annvars) {
    const LabeledSequent& s = p.sub.seqs.at(n);
    if (m.left ? s.countAnte(w, m.f) > 0 : s.countSucc(w, m.f) > 0) {
      holder = n;
      break;
    }
  }
  if (holder.empty()) throw std::logic_error("invert: occurrence not found at a pt node");
  out.sub.seqs.at(holder) = invReplace(m, p.sub.seqs.at(holder), w);
  out.premises.clear();
  for (size_t j = 0; j < p.premises.size(); ++j) {
    LabeledProof q = invertRec(cx, p.premises[j], w, m);
    for (auto& [jj, partner] : v.partners[holder]) {
      if (jj != int(j)) continue;
      auto iso = isomorphism(p.sub.seqs.at(holder), p.sub.seqs.at(partner));
      if (!iso) throw std::logic_error("invert: P2 partners not isomorphic");
      InvMode pm = m;
      pm.fresh = m.fresh.empty() ? Label() : freshLabel(cx);
      q = invertRec(cx, q, iso->at(w), pm);
      out.sub.seqs.at(partner) = invReplace(pm, p.sub.seqs.at(partner), iso->at(w));
    }
    out.premises.push_back(std::move(q));
  }
  return rebuilt(cx, std::move(out));
}

// ---------------------------------------------------------------------------
// contraction

InvMode modeFor(const Formula& f, bool left, int variant, Label fresh) {
  InvMode m;
  m.conn = f.kind();
  m.left = left;
  m.variant = variant;
  m.f = f;
  if (isBinary(f.kind())) {
    m.a = f.left();
    m.b2 = f.right();
  } else if (isUnary(f.kind())) {
    m.a = f.child();
  }
  m.fresh = fresh;
  return m;
}

LabeledProof contractRec(Ctx& cx, const LabeledProof& p, const Label& w, const Formula& f, bool left) {
  const LabeledRule* rule = cx.calc.find(p.rule);
  if (!rule) throw std::logic_error("contract: unknown rule " + p.rule);
  int have = left ? p.conclusion.countAnte(w, f) : p.conclusion.countSucc(w, f);
  if (have < 2) throw std::logic_error("contract: fewer than two copies");

  LabeledProof out = p;
  out.conclusion = p.conclusion;
  if (left)
    out.conclusion.removeAnte(w, f);
  else
    out.conclusion.removeSucc(w, f);

  auto ctxCount = [&](const LabeledSequent& s) { return left ? s.countAnte(w, f) : s.countSucc(w, f); };
  auto ctxRemove = [&](LabeledSequent& s) { left ? s.removeAnte(w, f) : s.removeSucc(w, f); };

  if (!rule->isPt) {
    LabeledSequent& ctx = out.sub.seqs.at("S");
    if (rule->initial) {
      if (ctxCount(ctx) < 1) throw std::logic_error("contract: no context copy at a leaf");
      ctxRemove(ctx);
      return rebuilt(cx, std::move(out));
    }
    bool principalIsCopy = false;
    if (!rule->conclusion.fmls.empty()) {
      const SchFml& pf = rule->conclusion.fmls[0];
      DisplaySubst d{p.sub.atoms, p.sub.formulas, {}};
      principalIsCopy = pf.inAnte == left && p.sub.labels.at(pf.lab) == w && instantiate(pf.fml, d) == f;
    }
    bool retaining = p.rule == "boxf_l" || p.rule == "boxp_l" || p.rule == "diaf_r" || p.rule == "diap_r";
    if (!principalIsCopy || (retaining && ctxCount(ctx) >= 1)) {
      // both copies pass through the premises (context-context, or context
      // plus a retained principal): contract them above
      if (ctxCount(ctx) < (principalIsCopy ? 1 : 2))
        throw std::logic_error("contract: copies not found in the instance of " + p.rule);
      ctxRemove(ctx);
      out.premises.clear();
      for (auto& q : p.premises) out.premises.push_back(contractRec(cx, q, w, f, left));
      return rebuilt(cx, std::move(out));
    }
    // a consuming rule's principal plus one context copy: invert the context
    // copy in the premises, contract the components, and reapply the rule
    ctxRemove(ctx);
    switch (f.kind()) {
      case Conn::Not: {
        LabeledProof q = invertRec(cx, p.premises[0], w, modeFor(f, left, 1, ""));
        q = left ? contractRec(cx, q, w, f.child(), false) : contractRec(cx, q, w, f.child(), true);
        out.premises = {q};
        return rebuilt(cx, std::move(out));
      }
      case Conn::And: {
        if (left) {
          LabeledProof q = invertRec(cx, p.premises[0], w, modeFor(f, true, 1, ""));
          q = contractRec(cx, q, w, f.left(), true);
          q = contractRec(cx, q, w, f.right(), true);
          out.premises = {q};
        } else {
          LabeledProof q1 = invertRec(cx, p.premises[0], w, modeFor(f, false, 1, ""));
          q1 = contractRec(cx, q1, w, f.left(), false);
          LabeledProof q2 = invertRec(cx, p.premises[1], w, modeFor(f, false, 2, ""));
          q2 = contractRec(cx, q2, w, f.right(), false);
          out.premises = {q1, q2};
        }
        return rebuilt(cx, std::move(out));
      }
      case Conn::Or: {
        if (left) {
          LabeledProof q1 = invertRec(cx, p.premises[0], w, modeFor(f, true, 1, ""));
          q1 = contractRec(cx, q1, w, f.left(), true);
          LabeledProof q2 = invertRec(cx, p.premises[1], w, modeFor(f, true, 2, ""));
          q2 = contractRec(cx, q2, w, f.right(), true);
          out.premises = {q1, q2};
        } else {
          LabeledProof q = invertRec(cx, p.premises[0], w, modeFor(f, false, 1, ""));
          q = contractRec(cx, q, w, f.left(), false);
          q = contractRec(cx, q, w, f.right(), false);
          out.premises = {q};
        }
        return rebuilt(cx, std::move(out));
      }
      case Conn::Imp: {
        if (left) {
          LabeledProof q1 = invertRec(cx, p.premises[0], w, modeFor(f, true, 1, ""));
          q1 = contractRec(cx, q1, w, f.left(), false);
          LabeledProof q2 = invertRec(cx, p.premises[1], w, modeFor(f, true, 2, ""));
          q2 = contractRec(cx, q2, w, f.right(), true);
          out.premises = {q1, q2};
        } else {
          LabeledProof q = invertRec(cx, p.premises[0], w, modeFor(f, false, 1, ""));
          q = contractRec(cx, q, w, f.left(), true);
          q = contractRec(cx, q, w, f.right(), false);
          out.premises = {q};
        }
        return rebuilt(cx, std::move(out));
      }
      case Conn::DiaF:
      case Conn::DiaP:
      case Conn::BoxF:
      case Conn::BoxP: {
        // fresh-label rules: invert the second copy, merge the two witnesses,
        // contract the subformula, reapply
        Label u = p.sub.labels.at("u");
        Label u2 = freshLabel(cx);
        LabeledProof q = invertRec(cx, p.premises[0], w, modeFor(f, left, 1, u2));
        q = substRec(cx, q, u, u2);
        q = contractRec(cx, q, u, f.child(), left);
        out.premises = {q};
        return rebuilt(cx, std::move(out));
      }
      default: throw std::logic_error("contract: unexpected principal " + f.str());
    }
  }

  // pt node
  PtView v = ptView(*rule, p.sub);
  LabeledSequent& ctx = out.sub.seqs.at(rule->contextVar);
  if (ctxCount(ctx) >= 1) {
    ctxRemove(ctx);
    out.premises.clear();
    for (auto& q : p.premises) out.premises.push_back(contractRec(cx, q, w, f, left));
    return rebuilt(cx, std::move(out));
  }
  // both copies inside annotated variables
  std::string holder;
  for (auto& [n, a] : rule->annvars)
    if (ctxCount(p.sub.seqs.at(n)) >= 1) {
      holder = n;
      break;
    }
  if (holder.empty()) throw std::logic_error("contract: copies not found at a pt node");
  ctxRemove(out.sub.seqs.at(holder));
  out.premises.clear();
  for (size_t j = 0; j < p.premises.size(); ++j) {
    LabeledProof q = contractRec(cx, p.premises[j], w, f, left);
    for (auto& [jj, partner] : v.partners[holder]) {
      if (jj != int(j)) continue;
      auto iso = isomorphism(p.sub.seqs.at(holder), p.sub.seqs.at(partner));
      if (!iso) throw std::logic_error("contract: P2 partners not isomorphic");
      q = contractRec(cx, q, iso->at(w), f, left);
      ctxRemove(out.sub.seqs.at(partner));
      // partner loses its mirrored copy too
      LabeledSequent& ps = out.sub.seqs.at(partner);
      (void)ps;
    }
    out.premises.push_back(std::move(q));
  }
  return rebuilt(cx, std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------
// public interface

LabeledProof resolveSubsts(const LabeledCalculus& calc, const LabeledProof& p, bool allowStructural) {
  LabeledProof out = p;
  out.premises.clear();
  for (auto& q : p.premises) out.premises.push_back(resolveSubsts(calc, q, allowStructural));
  const LabeledRule* rule = calc.find(p.rule);
  if (rule) {
    std::vector<LabeledSequent> prems;
    for (auto& q : out.premises) prems.push_back(q.conclusion);
    LabeledSubst full;
    if (!inferLabeledSubst(*rule, p.conclusion, prems, p.sub, full)) {
      // explicit substitutions are taken at face value (pt rules)
      full = p.sub;
    }
    out.sub = full;
  }
  return out;
}

LabeledProof renameProof(const LabeledCalculus& calc, const LabeledProof& p,
                         const std::map<Label, Label>& m, const std::set<Label>& avoid) {
  (void)calc;
  std::set<Label> all;
  collectLabels(p, all);
  std::set<Label> reserved = all;
  for (auto& [a, b] : m) reserved.insert(b);
  reserved.insert(avoid.begin(), avoid.end());
  LabelAllocator alloc(reserved);
  std::map<Label, Label> total = m;
  std::set<Label> conclusionLabels = p.conclusion.labels();
  for (auto& l : all)
    if (!conclusionLabels.count(l) && !total.count(l)) total[l] = alloc.fresh();
  return mapLabels(p, total);
}

LabeledProof weakenProof(const LabeledCalculus& calc, const LabeledProof& p, const LabeledSequent& extra) {
  if (extra.isEmpty()) return p;
  std::set<Label> avoid = extra.labels();
  LabeledProof q = renameProof(calc, p, {}, avoid);
  std::set<Label> all;
  collectLabels(q, all);
  all.insert(avoid.begin(), avoid.end());
  Ctx cx{calc, LabelAllocator(all)};
  return weakenRec(cx, q, {extra});
}

LabeledProof substProof(const LabeledCalculus& calc, const LabeledProof& p, const Label& keep,
                        const Label& merge) {
  LabeledProof q = renameProof(calc, p, {}, {keep, merge});
  std::set<Label> all;
  collectLabels(q, all);
  all.insert(keep);
  all.insert(merge);
  Ctx cx{calc, LabelAllocator(all)};
  return substRec(cx, q, keep, merge);
}

LabeledProof contractLeft(const LabeledCalculus& calc, const LabeledProof& p, const Label& w,
                          const Formula& f) {
  std::set<Label> all;
  collectLabels(p, all);
  Ctx cx{calc, LabelAllocator(all)};
  return contractRec(cx, p, w, f, true);
}

LabeledProof contractRight(const LabeledCalculus& calc, const LabeledProof& p, const Label& w,
                           const Formula& f) {
  std::set<Label> all;
  collectLabels(p, all);
  Ctx cx{calc, LabelAllocator(all)};
  return contractRec(cx, p, w, f, false);
}

LabeledProof eliminateStructural(const LabeledCalculus& calc, const LabeledProof& p) {
  LabeledProof node = p;
  std::vector<LabeledProof> kids;
  for (auto& q : p.premises) kids.push_back(eliminateStructural(calc, q));
  if (node.rule == "ls" || node.rule == "w" || node.rule == "cl" || node.rule == "cr") {
    const LabeledProof& child = kids[0];
    const LabeledSequent& prem = child.conclusion;
    if (node.rule == "ls") {
      Label keep, merge;
      if (node.sub.labels.count("w") && node.sub.labels.count("v")) {
        keep = node.sub.labels.at("w");
        merge = node.sub.labels.at("v");
      } else {
        std::set<Label> cl = node.conclusion.labels();
        for (auto& l : prem.labels())
          if (!cl.count(l)) merge = l;
        for (auto& l : cl)
          if (labelSubstitute(prem, merge, l) == node.conclusion) {
            keep = l;
            break;
          }
      }
      if (keep.empty() || merge.empty()) throw std::logic_error("eliminate: cannot infer ls labels");
      return substProof(calc, child, keep, merge);
    }
    if (node.rule == "w") {
      LabeledSequent extra;
      if (node.sub.seqs.count("T")) {
        extra = node.sub.seqs.at("T");
      } else {
        extra = node.conclusion;
        for (auto& r : prem.rel) extra.rel.erase(r);
        for (auto& x : prem.ante) extra.removeAnte(x.lab, x.fml);
        for (auto& x : prem.succ) extra.removeSucc(x.lab, x.fml);
      }
      return weakenProof(calc, child, extra);
    }
    // cl / cr
    Label w;
    Formula f;
    bool found = false;
    const auto& items = node.rule == "cl" ? node.conclusion.ante : node.conclusion.succ;
    for (auto& it : items) {
      int cPrem = node.rule == "cl" ? prem.countAnte(it.lab, it.fml) : prem.countSucc(it.lab, it.fml);
      int cCon =
          node.rule == "cl" ? node.conclusion.countAnte(it.lab, it.fml) : node.conclusion.countSucc(it.lab, it.fml);
      if (cPrem == cCon + 1) {
        w = it.lab;
        f = it.fml;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("eliminate: cannot infer the contracted formula");
    return node.rule == "cl" ? contractLeft(calc, child, w, f) : contractRight(calc, child, w, f);
  }
  node.premises = std::move(kids);
  return node;
}

}  // namespace tpk
