#include "tpk/notation.hpp"

#include <algorithm>
#include <stdexcept>

namespace tpk {

LabeledSequent toLabeledAnte(const Struct& x, const Label& w, LabelAllocator& alloc) {
  switch (x.kind()) {
    case SKind::I: return {};
    case SKind::Fml: {
      LabeledSequent s;
      s.addAnte(w, x.formula());
      return s;
    }
    case SKind::Star: return toLabeledSucc(x.child(), w, alloc);
    case SKind::Bullet: {
      Label u = alloc.fresh();
      LabeledSequent s = toLabeledAnte(x.child(), u, alloc);
      s.addRel(u, w);
      return s;
    }
    case SKind::Comp:
      return compose(toLabeledAnte(x.left(), w, alloc), toLabeledAnte(x.right(), w, alloc));
  }
  throw std::logic_error("toLabeledAnte");
}

LabeledSequent toLabeledSucc(const Struct& x, const Label& w, LabelAllocator& alloc) {
  switch (x.kind()) {
    case SKind::I: return {};
    case SKind::Fml: {
      LabeledSequent s;
      s.addSucc(w, x.formula());
      return s;
    }
    case SKind::Star: return toLabeledAnte(x.child(), w, alloc);
    case SKind::Bullet: {
      Label v = alloc.fresh();
      LabeledSequent s = toLabeledSucc(x.child(), v, alloc);
      s.addRel(w, v);
      return s;
    }
    case SKind::Comp:
      return compose(toLabeledSucc(x.left(), w, alloc), toLabeledSucc(x.right(), w, alloc));
  }
  throw std::logic_error("toLabeledSucc");
}

LabeledSequent toLabeled(const DisplaySequent& d, const Label& root) {
  LabelAllocator alloc({root});
  return compose(toLabeledAnte(d.ante, root, alloc), toLabeledSucc(d.succ, root, alloc));
}

namespace {

Struct chainOrUnit(const std::vector<Struct>& items) {
  if (items.empty()) return Struct::unit();
  return Struct::chain(items);
}

std::vector<Struct> flatFormulas(const LabeledSequent& s, const Label& w, bool ante) {
  std::vector<Struct> out;
  const auto& items = ante ? s.ante : s.succ;
  for (auto& lf : items)
    if (lf.lab == w) out.push_back(Struct::fml(lf.fml));
  // s.ante/succ are sorted, so the formulas come out in canonical order
  return out;
}

}  // namespace

std::vector<Struct> canonicalItems(const LabeledSequent& s, const Label& w, bool antePolarity) {
  std::vector<Struct> items;
  std::vector<Struct> gamma = flatFormulas(s, w, true);
  std::vector<Struct> delta = flatFormulas(s, w, false);
  if (antePolarity) {
    // D1: (Gamma|w) o *(Delta|w) o (*@* blocks for out-edges) o (@ blocks for in-edges)
    if (gamma.empty())
      items.push_back(Struct::unit());
    else
      items.assign(gamma.begin(), gamma.end());
    items.push_back(Struct::star(chainOrUnit(delta)));
  } else {
    items.push_back(Struct::star(chainOrUnit(gamma)));
    if (delta.empty())
      items.push_back(Struct::unit());
    else
      items.insert(items.end(), delta.begin(), delta.end());
  }
  std::vector<Struct> outBlocks, inBlocks;
  for (auto& r : s.rel) {
    if (r.from == w) {
      LabeledSequent sub = subpolytree(s, r.to, w);
      Struct inner = antePolarity ? displayAnte(sub, r.to) : displaySucc(sub, r.to);
      outBlocks.push_back(antePolarity ? Struct::star(Struct::bullet(Struct::star(inner)))
                                       : Struct::bullet(inner));
    } else if (r.to == w) {
      LabeledSequent sub = subpolytree(s, r.from, w);
      Struct inner = antePolarity ? displayAnte(sub, r.from) : displaySucc(sub, r.from);
      inBlocks.push_back(antePolarity ? Struct::bullet(inner)
                                      : Struct::star(Struct::bullet(Struct::star(inner))));
    }
  }
  auto byPrint = [](const Struct& a, const Struct& b) { return a.compare(b) < 0; };
  std::sort(outBlocks.begin(), outBlocks.end(), byPrint);
  std::sort(inBlocks.begin(), inBlocks.end(), byPrint);
  items.insert(items.end(), outBlocks.begin(), outBlocks.end());
  items.insert(items.end(), inBlocks.begin(), inBlocks.end());
  return items;
}

Struct displayAnte(const LabeledSequent& s, const Label& w) {
  return Struct::chain(canonicalItems(s, w, true));
}

Struct displaySucc(const LabeledSequent& s, const Label& w) {
  return Struct::chain(canonicalItems(s, w, false));
}

DisplaySequent toDisplay(const LabeledSequent& s, const Label& root) {
  return toDisplay(s, root, s, LabeledSequent::empty());
}

DisplaySequent toDisplay(const LabeledSequent& s, const Label& root, const LabeledSequent& left,
                         const LabeledSequent& right) {
  auto pc = polytreeCheck(s);
  if (!pc.ok) throw std::invalid_argument("toDisplay: not a labeled polytree sequent: " + pc.reason);
  if (!s.isEmpty() && !s.labels().count(root) )
    throw std::invalid_argument("toDisplay: root " + root + " does not occur in the sequent");
  if (auto err = checkPartition(s, root, left, right))
    throw std::invalid_argument("toDisplay: invalid partition: " + err->reason);
  return {displayAnte(left, root), displaySucc(right, root)};
}

DisplaySequent canonicalDisplay(const DisplaySequent& d) {
  Label root = "w0";
  LabeledSequent lam = toLabeled(d, root);
  return toDisplay(lam, root);
}

}  // namespace tpk
