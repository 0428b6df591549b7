#include "tpk/display_derive.hpp"

#include <algorithm>
#include <stdexcept>

namespace tpk {

Chain composeChains(Chain a, const Chain& b) {
  if (!(a.bottom() == b.top)) throw std::logic_error("composeChains: chains do not meet");
  a.steps.insert(a.steps.end(), b.steps.begin(), b.steps.end());
  return a;
}

Chain invertChain(const Chain& c) {
  Chain out;
  out.top = c.bottom();
  DisplaySequent prev = c.top;
  std::vector<std::pair<ChainStep, DisplaySequent>> rev;  // step + its source sequent
  for (auto& s : c.steps) {
    rev.push_back({s, prev});
    prev = s.conclusion;
  }
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    ChainStep inv = it->first;
    if (inv.rule == "pl") {
      inv.up = false;  // self inverse, with the swapped binding
      std::swap(inv.sub.structs.at("X"), inv.sub.structs.at("Y"));
    } else if (inv.rule == "pr") {
      inv.up = false;
      std::swap(inv.sub.structs.at("Y"), inv.sub.structs.at("Z"));
    } else {
      inv.up = !inv.up;
    }
    inv.conclusion = it->second;
    out.steps.push_back(inv);
  }
  return out;
}

CheckResult checkChain(const DisplayCalculus& calc, const Chain& c) {
  DisplaySequent prev = c.top;
  for (size_t i = 0; i < c.steps.size(); ++i) {
    const ChainStep& s = c.steps[i];
    const DisplayRule* rule = calc.find(s.rule);
    if (!rule) {
      CheckResult r;
      r.ok = false;
      r.path = {int(i)};
      r.message = "unknown rule " + s.rule;
      return r;
    }
    CheckResult r = checkInstance(calc, *rule, s.up, s.sub, s.conclusion, {prev});
    if (!r.ok) {
      r.path = {int(i)};
      return r;
    }
    prev = s.conclusion;
  }
  return {};
}

DisplayProof graftChain(const Chain& c, DisplayProof proofOfTop) {
  if (!(proofOfTop.conclusion == c.top)) throw std::logic_error("graftChain: proof does not end at the top");
  DisplayProof cur = std::move(proofOfTop);
  for (auto& s : c.steps) {
    DisplayProof node;
    node.rule = s.rule;
    node.up = s.up;
    node.sub = s.sub;
    node.conclusion = s.conclusion;
    node.premises.push_back(std::move(cur));
    cur = std::move(node);
  }
  return cur;
}

DisplayProof chainFragment(const Chain& c) {
  DisplayProof hyp;
  hyp.rule = "hyp";
  hyp.conclusion = c.top;
  return graftChain(c, std::move(hyp));
}

ChainBuilder::ChainBuilder(const DisplayCalculus& calc, DisplaySequent start) : calc_(&calc) {
  chain_.top = std::move(start);
}

void ChainBuilder::apply(const std::string& ruleName, bool up, DisplaySubst partial) {
  const DisplayRule* rule = calc_->find(ruleName);
  if (!rule) throw std::logic_error("ChainBuilder: unknown rule " + ruleName);
  if (rule->premises.size() != 1) throw std::logic_error("ChainBuilder: " + ruleName + " is not single premise");
  if (up && !rule->reversible) throw std::logic_error("ChainBuilder: " + ruleName + " is not reversible");
  const SeqPat& fromPat = up ? rule->conclusion : rule->premises[0];
  const SeqPat& toPat = up ? rule->premises[0] : rule->conclusion;
  DisplaySubst s = std::move(partial);
  if (!match(fromPat, current(), s))
    throw std::logic_error("ChainBuilder: " + ruleName + (up ? " (up)" : "") + " does not match '" +
                           current().str() + "'");
  ChainStep step;
  step.rule = ruleName;
  step.up = up;
  step.conclusion = instantiate(toPat, s);
  step.sub = std::move(s);
  chain_.steps.push_back(std::move(step));
}

void ChainBuilder::append(const Chain& c) {
  if (!(c.top == current())) throw std::logic_error("ChainBuilder::append: chain does not start here");
  chain_.steps.insert(chain_.steps.end(), c.steps.begin(), c.steps.end());
}

namespace {

DisplaySubst withZ(const Struct& z) {
  DisplaySubst s;
  s.structs["Z"] = z;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// displayAt

DisplayAtResult displayAt(const DisplayCalculus& calc, const DisplaySequent& d, const SeqPath& at) {
  const Struct& root = at.side == 0 ? d.ante : d.succ;
  if (!root.at(at.path)) throw std::invalid_argument("displayAt: invalid path");
  ChainBuilder b(calc, d);
  bool ante = at.side == 0;
  std::vector<int> path = at.path;
  for (size_t k = 0; k < path.size(); ++k) {
    int step = path[k];
    const DisplaySequent& cur = b.current();
    const Struct& side = ante ? cur.ante : cur.succ;
    switch (side.kind()) {
      case SKind::Comp: {
        const Struct& sib = step == 0 ? side.right() : side.left();
        bool sibStar = sib.kind() == SKind::Star;
        if (ante) {
          if (step == 0) {
            b.apply("d1", false);
            if (sibStar) {  // X |- Z o **E  ~>  X |- Z o E
              b.apply("d4", false);
              b.apply("d8", false);
              b.apply("d4", true);
            }
          } else {
            b.apply("d2", false);
            if (sibStar) {  // Y |- **E o Z  ~>  Y |- E o Z
              b.apply("d3", false);
              b.apply("d8", false);
              b.apply("d3", true);
            }
          }
        } else {
          if (step == 0) {
            b.apply("d3", false);
            if (sibStar) {  // X o **E |- L  ~>  X o E |- L
              b.apply("d2", false);
              b.apply("d7", false);
              b.apply("d2", true);
            }
          } else {
            b.apply("d4", false);
            if (sibStar) {  // **E o X |- R  ~>  X o E |- R
              b.apply("d1", false);
              b.apply("d7", false);
              b.apply("d1", true);
              b.apply("pl", false);
            }
          }
        }
        break;
      }
      case SKind::Star:
        b.apply(ante ? "d5" : "d6", false);
        ante = !ante;
        break;
      case SKind::Bullet:
        b.apply("d9", ante);
        break;
      default: throw std::invalid_argument("displayAt: path leaves the structure");
    }
  }
  DisplayAtResult res;
  res.antecedent = ante;
  res.chain = b.take();
  return res;
}

// ---------------------------------------------------------------------------
// rho expansions

namespace {

void rho1Chain(ChainBuilder& b, bool dirUp) {
  if (!dirUp) {  // *@*X |- Y  ~>  X |- *@*Y
    b.apply("d5", false);
    b.apply("d9", false);
    b.apply("d6", false);
  } else {  // X |- *@*Y  ~>  *@*X |- Y
    b.apply("d6", false);
    b.apply("d9", true);
    b.apply("d5", true);
  }
}

}  // namespace

Chain expandRho(const DisplayCalculus& calc, int rho, const Struct& x, const Struct& y, const Struct& z,
                bool dirUp) {
  auto sbs = [](const Struct& s) { return Struct::star(Struct::bullet(Struct::star(s))); };
  switch (rho) {
    case 1: {
      DisplaySequent top = dirUp ? DisplaySequent{x, sbs(y)} : DisplaySequent{sbs(x), y};
      ChainBuilder b(calc, top);
      rho1Chain(b, dirUp);
      return b.take();
    }
    case 2: {
      ChainBuilder b(calc, {x, Struct::comp(Struct::bullet(y), Struct::bullet(z))});
      b.apply("d3", false);
      b.apply("d9", false);
      b.apply("wr", false, withZ(z));
      b.apply("d9", true);
      b.apply("d3", true);
      b.apply("d4", false);
      b.apply("d9", false);
      b.apply("wr", false, withZ(y));
      b.apply("pr", false);
      b.apply("d9", true);
      b.apply("d4", true);
      b.apply("cr", false);
      return b.take();
    }
    case 3: {
      ChainBuilder b(calc, {x, Struct::comp(sbs(y), sbs(z))});
      b.apply("d3", false);
      rho1Chain(b, true);
      b.apply("wr", false, withZ(z));
      rho1Chain(b, false);
      b.apply("d3", true);
      b.apply("d4", false);
      rho1Chain(b, true);
      b.apply("wr", false, withZ(y));
      b.apply("pr", false);
      rho1Chain(b, false);
      b.apply("d4", true);
      b.apply("cr", false);
      return b.take();
    }
    case 4: {
      ChainBuilder b(calc, {Struct::comp(Struct::bullet(x), Struct::bullet(y)), z});
      b.apply("d1", false);
      b.apply("d9", true);
      b.apply("wl", false, withZ(y));
      b.apply("pl", false);
      b.apply("d9", false);
      b.apply("d1", true);
      b.apply("d2", false);
      b.apply("d9", true);
      b.apply("wl", false, withZ(x));
      b.apply("d9", false);
      b.apply("d2", true);
      b.apply("cl", false);
      return b.take();
    }
    case 5: {
      ChainBuilder b(calc, {Struct::comp(sbs(x), sbs(y)), z});
      b.apply("d1", false);
      rho1Chain(b, false);
      b.apply("wl", false, withZ(y));
      b.apply("pl", false);
      rho1Chain(b, true);
      b.apply("d1", true);
      b.apply("d2", false);
      rho1Chain(b, false);
      b.apply("wl", false, withZ(x));
      rho1Chain(b, true);
      b.apply("d2", true);
      b.apply("cl", false);
      return b.take();
    }
    default: throw std::invalid_argument("expandRho: rho must be 1..5");
  }
}

// ---------------------------------------------------------------------------
// canonicalization

namespace {

// The normalizer drives a ChainBuilder toward the canonical display form.
// All list surgery happens at the top of the antecedent; deeper positions are
// reached by displaying material and undoing the moves afterwards.
struct Normalizer {
  ChainBuilder& b;
  int guard = 0;

  explicit Normalizer(ChainBuilder& b) : b(b) {}

  void tick() {
    if (++guard > 2000000) throw std::logic_error("normalizer did not terminate");
  }

  const Struct& ante() { return b.current().ante; }

  // --- peeling ---------------------------------------------------------
  void peelLeft() { b.apply("d1", false); }    // X o Y |- S  =>  X |- S o *Y
  void unpeelLeft() { b.apply("d1", true); }
  void peelRight() { b.apply("d2", false); }   // X o Y |- S  =>  Y |- *X o S
  void unpeelRight() { b.apply("d2", true); }

  // --- comb shaping ----------------------------------------------------
  bool isComb(const Struct& s) {
    const Struct* cur = &s;
    while (cur->kind() == SKind::Comp) {
      if (cur->right().kind() == SKind::Comp) return false;
      cur = &cur->left();
    }
    return true;
  }

  // Rebuilds the antecedent as a left comb with the same leaf order.
  void flatten() {
    tick();
    if (ante().kind() != SKind::Comp) return;
    peelRight();
    flatten();
    unpeelRight();
    peelLeft();
    flatten();
    unpeelLeft();
    mergeCombs();
  }

  // top = L o R with both sides combed; result: one left comb.
  void mergeCombs() {
    tick();
    if (ante().kind() != SKind::Comp) return;
    if (ante().right().kind() != SKind::Comp) return;  // already a comb at the top
    b.apply("al", false);                              // L o (R1 o r2)  =>  (L o R1) o r2
    peelLeft();
    mergeCombs();
    unpeelLeft();
  }

  std::vector<Struct> items() {
    std::vector<Struct> out;
    const Struct* cur = &ante();
    while (cur->kind() == SKind::Comp) {
      out.push_back(cur->right());
      cur = &cur->left();
    }
    out.push_back(*cur);
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Swaps items i and i+1 of the comb (0-based).
  void swapAt(int i, int n) {
    tick();
    for (int k = 0; k < n - 2 - i; ++k) peelLeft();
    if (i == 0) {
      b.apply("pl", false);
    } else {
      b.apply("al", true);  // (P o xi) o xj  =>  P o (xi o xj)
      peelRight();
      b.apply("pl", false);
      unpeelRight();
      b.apply("al", false);
    }
    for (int k = 0; k < n - 2 - i; ++k) unpeelLeft();
  }

  // Moves item i to the last position.
  void moveToLast(int i, int n) {
    for (int k = i; k < n - 1; ++k) swapAt(k, n);
  }

  // Displays item i alone as the whole antecedent; returns how to restore.
  bool displayItem(int i, int n) {
    if (n == 1) return false;
    moveToLast(i, n);
    peelRight();
    return true;
  }

  void undisplayItem(bool peeled) {
    if (peeled) unpeelRight();
  }

  // Drops item i, which must be I (n >= 2).
  void dropUnit(int i, int n) {
    // bring to front, then (Il) up
    for (int k = i; k > 0; --k) swapAt(k - 1, n);
    for (int k = 0; k < n - 2; ++k) peelLeft();
    b.apply("Il", true);
    for (int k = 0; k < n - 2; ++k) unpeelLeft();
  }

  // --- item classification ----------------------------------------------
  // 0 formula, 1 *formula, 2 *@*D block, 3 @D block, -1 needs a rewrite,
  // -2 unit to drop
  int classify(const Struct& x) {
    switch (x.kind()) {
      case SKind::I: return -2;
      case SKind::Fml: return 0;
      case SKind::Bullet: return 3;
      case SKind::Star:
        switch (x.child().kind()) {
          case SKind::I: return -2;
          case SKind::Fml: return 1;
          case SKind::Bullet:
            return x.child().child().kind() == SKind::Star ? 2 : -1;
          default: return -1;  // ** or *(A o B)
        }
      case SKind::Comp: return -1;  // flattened away
    }
    return -1;
  }

  // Rewrites the displayed item (whole antecedent) into classified shape.
  // Returns true if something changed.
  bool rewriteDisplayed() {
    const Struct& x = ante();
    if (x.kind() == SKind::Star) {
      const Struct& e = x.child();
      if (e.kind() == SKind::Star) {  // **E |- W  =>  E |- W
        b.apply("d7", false);
        return true;
      }
      if (e.kind() == SKind::Comp) {  // *(A o B) |- W  =>  *A o *B |- W
        b.apply("d5", false);
        b.apply("d4", false);
        b.apply("d1", false);
        b.apply("pr", false);
        b.apply("d3", false);
        b.apply("d8", false);
        return true;
      }
      if (e.kind() == SKind::Bullet && e.child().kind() != SKind::Star) {
        // *@E |- W  =>  *@**E |- W
        b.apply("d5", false);
        b.apply("d9", false);
        b.apply("d8", true);
        b.apply("d9", true);
        b.apply("d5", true);
        return true;
      }
    }
    return false;
  }

  // One pass of the rewrite loop; true when a rewrite happened.
  bool rewritePass() {
    flatten();
    std::vector<Struct> xs = items();
    int n = int(xs.size());
    for (int i = 0; i < n; ++i) {
      int c = classify(xs[i]);
      if (c == -2) {
        if (xs[i].kind() == SKind::Star) {  // *I  =>  I
          bool peeled = displayItem(i, n);
          b.apply("ql", true);
          undisplayItem(peeled);
          return true;
        }
        if (n >= 2) {
          dropUnit(i, n);
          return true;
        }
        continue;  // a lone I; the assembly phase handles it
      }
      if (c == -1) {
        bool peeled = displayItem(i, n);
        if (!rewriteDisplayed())
          throw std::logic_error("normalizer: unhandled item " + ante().str());
        undisplayItem(peeled);
        return true;
      }
    }
    return false;
  }

  // A structure is in canonical antecedent form iff rebuilding it from its
  // own L image reproduces it.
  static bool isCanonicalAnte(const Struct& d) {
    LabelAllocator alloc({"t0"});
    LabeledSequent lam = toLabeledAnte(d, "t0", alloc);
    return d == displayAnte(lam, "t0");
  }

  // Recurses into the child blocks of the (classified, combed) antecedent.
  void recurseBlocks() {
    while (true) {
      tick();
      std::vector<Struct> xs = items();
      int n = int(xs.size());
      int target = -1, cls = 0;
      for (int i = 0; i < n; ++i) {
        int c = classify(xs[i]);
        if (c != 2 && c != 3) continue;
        Struct d = c == 2 ? xs[i].child().child().child() : xs[i].child();
        if (!isCanonicalAnte(d)) {
          target = i;
          cls = c;
          break;
        }
      }
      if (target < 0) return;
      bool peeled = displayItem(target, n);
      if (cls == 2) {
        rho1Chain(b, false);  // *@*D |- W  =>  D |- *@*W
      } else {
        b.apply("d9", true);  // @D |- W  =>  D |- @W
      }
      normalize();
      if (cls == 2) {
        rho1Chain(b, true);
      } else {
        b.apply("d9", false);
      }
      undisplayItem(peeled);
      flatten();
    }
  }

  static int itemClassOf(const Struct& x) {
    switch (x.kind()) {
      case SKind::I: return 0;
      case SKind::Fml: return 0;
      case SKind::Star:
        if (x.child().kind() == SKind::Bullet) return 2;
        return 1;  // *formula, *I, *(chain)
      case SKind::Bullet: return 3;
      default: return 4;
    }
  }

  static bool itemLess(const Struct& a, const Struct& b) {
    int ca = itemClassOf(a), cb = itemClassOf(b);
    if (ca != cb) return ca < cb;
    return a.compare(b) < 0;
  }

  void sortItems() {
    while (true) {
      tick();
      std::vector<Struct> xs = items();
      int n = int(xs.size());
      bool swapped = false;
      for (int i = 0; i + 1 < n; ++i) {
        if (itemLess(xs[i + 1], xs[i])) {
          swapAt(i, n);
          swapped = true;
          break;
        }
      }
      if (!swapped) break;
    }
  }

  // Merges adjacent class-1 items (sorted) into a single *(f1 o ... o fk).
  void mergeStarItems() {
    while (true) {
      tick();
      std::vector<Struct> xs = items();
      int n = int(xs.size());
      int first = -1;
      for (int i = 0; i + 1 < n; ++i) {
        if (xs[i].kind() == SKind::Star && xs[i + 1].kind() == SKind::Star &&
            xs[i].child().kind() != SKind::Bullet && xs[i + 1].child().kind() != SKind::Bullet) {
          first = i;
          break;
        }
      }
      if (first < 0) break;
      // isolate the pair (x_first o x_first+1) at the top and apply the
      // inverted split
      int i = first;
      for (int k = 0; k < n - 2 - i; ++k) peelLeft();
      bool wrapped = false;
      if (i > 0) {
        b.apply("al", true);
        peelRight();
        wrapped = true;
      }
      // now: *A o *B |- W  =>  *(A o B) |- W (inverse of the split chain)
      b.apply("d8", true);
      b.apply("d3", true);
      b.apply("pr", false);
      b.apply("d1", true);
      b.apply("d4", true);
      b.apply("d5", true);
      if (wrapped) unpeelRight();  // the pair is one item now; no reassociation
      for (int k = 0; k < n - 2 - i; ++k) unpeelLeft();
      flatten();
    }
  }

  void ensurePlaceholders() {
    std::vector<Struct> xs = items();
    bool hasFml = false, hasStar = false;
    for (auto& x : xs) {
      if (x.kind() == SKind::Fml) hasFml = true;
      if (x.kind() == SKind::Star && x.child().kind() != SKind::Bullet) hasStar = true;
      if (x.kind() == SKind::I) hasFml = true;             // lone unit survivor
      if (x.kind() == SKind::Star && x.child().kind() == SKind::I) hasStar = true;
    }
    if (!hasStar) {
      b.apply("Il", false);
      flatten();
      std::vector<Struct> ys = items();
      int n = int(ys.size());
      // turn the fresh front I into *I
      moveToLast(0, n);
      bool peeled = displayItem(n - 1, n);
      b.apply("ql", false);
      undisplayItem(peeled);
    }
    if (!hasFml) {
      b.apply("Il", false);
      flatten();
    }
  }

  void normalize() {
    tick();
    while (rewritePass()) tick();
    recurseBlocks();
    sortItems();
    mergeStarItems();
    ensurePlaceholders();
    sortItems();
  }
};

}  // namespace

Chain deriveToCanonical(const DisplayCalculus& calc, const DisplaySequent& d) {
  ChainBuilder b(calc, d);
  // move the succedent into the antecedent: X |- Y  =>  X o *Y |- *I o I
  b.apply("Ir", false);
  b.apply("d3", false);
  b.apply("qr", false);
  b.apply("Ir", false);
  b.apply("pr", false);
  Normalizer n(b);
  n.normalize();
  Chain c = b.take();
  DisplaySequent want = canonicalDisplay(d);
  if (!(c.bottom() == want))
    throw std::logic_error("deriveToCanonical: reached '" + c.bottom().str() + "' but the canonical form is '" +
                           want.str() + "'");
  return c;
}

Chain deriveShape(const DisplayCalculus& calc, const DisplaySequent& from, const DisplaySequent& to) {
  Chain a = deriveToCanonical(calc, from);
  Chain bb = deriveToCanonical(calc, to);
  if (!(a.bottom() == bb.bottom())) {
    // The turnstile may sit at different nodes of the same underlying
    // sequent; bridge with a root relabel.
    LabeledSequent l1 = toLabeled(from, "w0");
    LabeledSequent l2 = toLabeled(to, "r0");
    auto iso = isomorphism(l1, l2);
    if (!iso)
      throw std::logic_error("deriveShape: '" + from.str() + "' and '" + to.str() +
                             "' are not display equivalent");
    Label mid;
    for (auto& [x, y] : *iso)
      if (y == "r0") mid = x;
    if (mid.empty()) throw std::logic_error("deriveShape: target root not in the isomorphism image");
    a = composeChains(std::move(a), deriveRootRelabel(calc, l1, "w0", mid));
    if (!(a.bottom() == bb.bottom()))
      throw std::logic_error("deriveShape: canonical forms still differ after relabeling");
  }
  return composeChains(std::move(a), invertChain(bb));
}

namespace {

std::vector<int> pathToItem(int n, int i) {
  std::vector<int> p;
  for (int k = 0; k < n - 1 - i; ++k) p.push_back(0);
  if (i > 0) p.push_back(1);
  return p;
}

// One adjacency step: from toDisplay(s, x) to toDisplay(s, y) across an edge.
Chain rootShift(const DisplayCalculus& calc, const LabeledSequent& s, const Label& x, const Label& y) {
  bool outEdge = s.rel.count({x, y}) > 0;
  if (!outEdge && !s.rel.count({y, x})) throw std::invalid_argument("rootShift: no edge between the labels");
  LabeledSequent sub = subpolytree(s, y, x);
  Struct inner = displayAnte(sub, y);
  Struct block = outEdge ? Struct::star(Struct::bullet(Struct::star(inner))) : Struct::bullet(inner);
  std::vector<Struct> xs = canonicalItems(s, x, true);
  int idx = -1;
  for (int i = 0; i < int(xs.size()); ++i)
    if (xs[i] == block) {
      idx = i;
      break;
    }
  if (idx < 0) throw std::logic_error("rootShift: block for " + y + " not found in the canonical form");

  DisplaySequent start = toDisplay(s, x);
  auto at = displayAt(calc, start, {0, pathToItem(int(xs.size()), idx)});
  ChainBuilder b(calc, start);
  b.append(at.chain);
  if (outEdge)
    rho1Chain(b, false);
  else
    b.apply("d9", true);
  Normalizer n(b);
  // fold the old root's material into the antecedent and renormalize
  b.apply("Ir", false);
  b.apply("d3", false);
  b.apply("qr", false);
  b.apply("Ir", false);
  b.apply("pr", false);
  n.normalize();
  Chain c = b.take();
  DisplaySequent want = toDisplay(s, y);
  if (!(c.bottom() == want))
    throw std::logic_error("rootShift: reached '" + c.bottom().str() + "' but expected '" + want.str() + "'");
  return c;
}

}  // namespace

Chain deriveRootRelabel(const DisplayCalculus& calc, const LabeledSequent& s, const Label& from,
                        const Label& to) {
  auto pc = polytreeCheck(s);
  if (!pc.ok) throw std::invalid_argument("deriveRootRelabel: not a polytree: " + pc.reason);
  std::set<Label> labs = s.labels();
  if (!labs.count(from) || !labs.count(to))
    throw std::invalid_argument("deriveRootRelabel: label not in the sequent");
  // BFS path in the underlying tree
  std::map<Label, Label> parent;
  std::vector<Label> queue{from};
  parent[from] = from;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    Label cur = queue[qi];
    for (auto& r : s.rel) {
      Label next;
      if (r.from == cur)
        next = r.to;
      else if (r.to == cur)
        next = r.from;
      else
        continue;
      if (!parent.count(next)) {
        parent[next] = cur;
        queue.push_back(next);
      }
    }
  }
  std::vector<Label> path{to};
  while (path.back() != from) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  Chain c;
  c.top = toDisplay(s, from);
  for (size_t i = 0; i + 1 < path.size(); ++i) c = composeChains(std::move(c), rootShift(calc, s, path[i], path[i + 1]));
  return c;
}

Chain derivePartitionInvariance(const DisplayCalculus& calc, const LabeledSequent& s, const Label& w,
                                const LabeledSequent& a1, const LabeledSequent& b1,
                                const LabeledSequent& a2, const LabeledSequent& b2) {
  DisplaySequent from = toDisplay(s, w, a1, b1);
  DisplaySequent to = toDisplay(s, w, a2, b2);
  if (from == to) {
    Chain c;
    c.top = from;
    return c;
  }
  return deriveShape(calc, from, to);
}

Chain deriveToggle(const DisplayCalculus& calc, const LabeledSequent& s, const Label& w, int variant,
                   const Struct& context) {
  Struct d1 = displayAnte(s, w), d2 = displaySucc(s, w);
  DisplaySequent from, to;
  switch (variant) {
    case 1:
      from = {d1, context};
      to = {Struct::star(d2), context};
      break;
    case 2:
      from = {Struct::star(d1), context};
      to = {d2, context};
      break;
    case 3:
      from = {context, d2};
      to = {context, Struct::star(d1)};
      break;
    case 4:
      from = {context, Struct::star(d2)};
      to = {context, d1};
      break;
    default: throw std::invalid_argument("deriveToggle: variant must be 1..4");
  }
  return deriveShape(calc, from, to);
}

}  // namespace tpk
