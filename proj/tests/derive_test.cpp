#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tpk/display_derive.hpp"
#include "tpk/parse.hpp"

using namespace tpk;

namespace {

Struct randomStruct(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  switch (pick(rng)) {
    case 0: return Struct::fml(Formula::atom(std::string(1, char('p' + rng() % 3))));
    case 1: return Struct::unit();
    case 2:
    case 3: return Struct::star(randomStruct(rng, depth - 1));
    case 4: return Struct::bullet(randomStruct(rng, depth - 1));
    default: return Struct::comp(randomStruct(rng, depth - 1), randomStruct(rng, depth - 1));
  }
}

DisplaySequent randomSequent(std::mt19937_64& rng, int depth) {
  return {randomStruct(rng, depth), randomStruct(rng, depth)};
}

std::vector<SeqPath> allPaths(const DisplaySequent& d) {
  std::vector<SeqPath> out;
  std::function<void(const Struct&, SeqPath)> go = [&](const Struct& s, SeqPath p) {
    out.push_back(p);
    switch (s.kind()) {
      case SKind::Star:
      case SKind::Bullet: {
        SeqPath q = p;
        q.path.push_back(0);
        go(s.child(), q);
        break;
      }
      case SKind::Comp: {
        SeqPath l = p, r = p;
        l.path.push_back(0);
        r.path.push_back(1);
        go(s.left(), l);
        go(s.right(), r);
        break;
      }
      default: break;
    }
  };
  go(d.ante, {0, {}});
  go(d.succ, {1, {}});
  return out;
}

}  // namespace

TEST_CASE("L translation golden") {
  DisplaySequent d = parseDisplaySequent("@(*p o <P>q) |- *@q");
  LabeledSequent lam = toLabeled(d, "w0");
  LabeledSequent want = parseLabeledSequent("R u w, R v w, u: <P>q, v: q => u: p");
  CHECK(isomorphic(lam, want));
  CHECK(isPolytree(lam));
  CHECK(lam.length() <= d.length());
  // identity-style base cases
  CHECK(toLabeled(parseDisplaySequent("p |- p"), "w") == parseLabeledSequent("w: p => w: p"));
  CHECK(toLabeled(parseDisplaySequent("I |- top"), "w") == parseLabeledSequent("=> w: top"));
}

TEST_CASE("D translation golden with the paper partition") {
  LabeledSequent lam = parseLabeledSequent("R u w, R v w, u: <P>q, v: q => u: p");
  LabeledSequent left = parseLabeledSequent("R u w, u: <P>q => u: p");
  LabeledSequent right = parseLabeledSequent("R v w, v: q =>");
  DisplaySequent d = toDisplay(lam, "w", left, right);
  CHECK(d.str() == "I o *I o @(<P>q o *p) |- *I o I o *@*(*q o I)");
  // default partition on a flat sequent
  DisplaySequent flat = toDisplay(parseLabeledSequent("w: p => w: q"), "w");
  CHECK(flat.str() == "p o *q |- *I o I");
}

TEST_CASE("L of D is the identity up to isomorphism") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    DisplaySequent d = randomSequent(rng, 4);
    LabeledSequent lam = toLabeled(d, "w0");
    DisplaySequent dd = toDisplay(lam, "w0");
    CHECK(isomorphic(toLabeled(dd, "w0"), lam));
  }
}

TEST_CASE("chain basics and rho expansions") {
  DisplayCalculus calc;
  Struct X = parseStruct("p o q"), Y = parseStruct("*r"), Z = parseStruct("@s");
  for (int rho = 1; rho <= 5; ++rho) {
    Chain c = expandRho(calc, rho, X, Y, Z, false);
    CHECK(checkChain(calc, c).ok);
    if (rho == 1) {
      CHECK(c.top == DisplaySequent{parseStruct("*@*(p o q)"), Y});
      CHECK(c.bottom() == DisplaySequent{X, parseStruct("*@*(*r)")});
      CHECK(c.length() == 3);
      Chain up = expandRho(calc, 1, X, Y, Z, true);
      CHECK(checkChain(calc, up).ok);
      CHECK(up.top == c.bottom());
      CHECK(up.bottom() == c.top);
    }
  }
  Chain c2 = expandRho(calc, 2, X, Y, Z);
  CHECK(c2.bottom() == DisplaySequent{X, parseStruct("@(*r o @s)")});
  Chain c4 = expandRho(calc, 4, X, Y, Z);
  CHECK(c4.top == parseDisplaySequent("@(p o q) o @*r |- @s"));
  CHECK(c4.bottom() == parseDisplaySequent("@(p o q o *r) |- @s"));
  // rho1 is invertible as a chain
  Chain inv = invertChain(expandRho(calc, 1, X, Y, Z));
  CHECK(checkChain(calc, inv).ok);
}

TEST_CASE("displayAt golden examples") {
  DisplayCalculus calc;
  DisplaySequent d = parseDisplaySequent("@(*a o b) |- *I o (c o d)");
  // display b
  auto r1 = displayAt(calc, d, {0, {0, 1}});
  CHECK(r1.antecedent);
  CHECK(checkChain(calc, r1.chain).ok);
  CHECK(r1.chain.bottom() == parseDisplaySequent("b |- a o @(*I o (c o d))"));
  // display c
  auto r2 = displayAt(calc, d, {1, {1, 0}});
  CHECK(!r2.antecedent);
  CHECK(checkChain(calc, r2.chain).ok);
  CHECK(r2.chain.bottom() == parseDisplaySequent("(@(*a o b) o I) o *d |- c"));
  // display the whole antecedent: empty chain
  auto r3 = displayAt(calc, d, {0, {}});
  CHECK(r3.chain.length() == 0);
}

TEST_CASE("displayAt displays every position with the right polarity") {
  DisplayCalculus calc;
  std::mt19937_64 rng(31);
  for (int i = 0; i < 120; ++i) {
    DisplaySequent d = randomSequent(rng, 3);
    for (auto& p : allPaths(d)) {
      const Struct* target = (p.side == 0 ? d.ante : d.succ).at(p.path);
      REQUIRE(target);
      auto r = displayAt(calc, d, p);
      CHECK(checkChain(calc, r.chain).ok);
      bool apart = polarity(d, p) == Polarity::APart;
      CHECK(r.antecedent == apart);
      CHECK((apart ? r.chain.bottom().ante : r.chain.bottom().succ) == *target);
      CHECK(r.chain.length() <= 5 * d.length());
      // polarity is preserved: the displayed occurrence sits on its own side
      CHECK(isomorphic(toLabeled(r.chain.bottom(), "w0"), toLabeled(d, "w0")));
    }
  }
}

TEST_CASE("deriveToCanonical") {
  DisplayCalculus calc;
  std::mt19937_64 rng(41);
  for (int i = 0; i < 150; ++i) {
    DisplaySequent d = randomSequent(rng, 3);
    Chain c = deriveToCanonical(calc, d);
    CHECK(checkChain(calc, c).ok);
    CHECK(c.bottom() == canonicalDisplay(d));
    Chain inv = invertChain(c);
    CHECK(checkChain(calc, inv).ok);
    CHECK(inv.bottom() == d);
  }
}

TEST_CASE("deriveShape connects display-equivalent sequents") {
  DisplayCalculus calc;
  // the two displays of the same sequent from the a-part/c-part example
  DisplaySequent d1 = parseDisplaySequent("@(*a o b) |- *I o (c o d)");
  DisplaySequent d2 = parseDisplaySequent("b |- a o @(*I o (c o d))");
  Chain c = deriveShape(calc, d1, d2);
  CHECK(checkChain(calc, c).ok);
  CHECK(c.top == d1);
  CHECK(c.bottom() == d2);
}

TEST_CASE("toggle derivations") {
  DisplayCalculus calc;
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    LabeledSequent lam = toLabeled(randomSequent(rng, 2), "w0");
    Struct ctx = Struct::fml(Formula::atom("x"));
    for (int v = 1; v <= 4; ++v) {
      Chain c = deriveToggle(calc, lam, "w0", v, ctx);
      CHECK(checkChain(calc, c).ok);
    }
  }
  // empty sequent, variant 2: *D1 |- X ~> D2 |- X
  Chain c = deriveToggle(calc, LabeledSequent::empty(), "w0", 2, Struct::fml(Formula::atom("x")));
  CHECK(checkChain(calc, c).ok);
}

TEST_CASE("root relabel") {
  DisplayCalculus calc;
  LabeledSequent lam = parseLabeledSequent("R u w, R v w, u: <P>q, v: q => u: p");
  Chain c = deriveRootRelabel(calc, lam, "w", "u");
  CHECK(checkChain(calc, c).ok);
  CHECK(c.top == toDisplay(lam, "w"));
  CHECK(c.bottom() == toDisplay(lam, "u"));
  // identity when from == to
  Chain id = deriveRootRelabel(calc, lam, "w", "w");
  CHECK(id.length() == 0);
}

TEST_CASE("root relabel on random polytrees, all label pairs") {
  DisplayCalculus calc;
  std::mt19937_64 rng(61);
  for (int i = 0; i < 8; ++i) {
    DisplaySequent d = randomSequent(rng, 3);
    LabeledSequent lam = toLabeled(d, "w0");
    std::set<Label> labset = lam.labels();
    std::vector<Label> labs(labset.begin(), labset.end());
    if (labs.empty()) continue;
    for (auto& a : labs)
      for (auto& b : labs) {
        Chain c = deriveRootRelabel(calc, lam, a, b);
        CHECK(checkChain(calc, c).ok);
        CHECK(c.bottom() == toDisplay(lam, b));
      }
  }
}

TEST_CASE("partition invariance") {
  DisplayCalculus calc;
  LabeledSequent lam = parseLabeledSequent("R u w, R v w, u: <P>q, v: q => u: p");
  LabeledSequent a1 = parseLabeledSequent("R u w, u: <P>q => u: p");
  LabeledSequent b1 = parseLabeledSequent("R v w, v: q =>");
  Chain c = derivePartitionInvariance(calc, lam, "w", a1, b1, lam, LabeledSequent::empty());
  CHECK(checkChain(calc, c).ok);
  CHECK(c.top == toDisplay(lam, "w", a1, b1));
  CHECK(c.bottom() == toDisplay(lam, "w"));
  // identical partitions: empty derivation
  Chain id = derivePartitionInvariance(calc, lam, "w", a1, b1, a1, b1);
  CHECK(id.length() == 0);
}

TEST_CASE("display equivalence is invisible to the L translation") {
  // For every applicable display or reversible structural rule, the premise
  // and conclusion have isomorphic L images.
  DisplayCalculus calc;
  std::mt19937_64 rng(71);
  std::vector<std::string> rules{"d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8", "d9",
                                 "Il", "Ir", "ql", "qr", "al", "ar", "pl", "pr"};
  int tried = 0;
  for (int i = 0; tried < 1000 && i < 20000; ++i) {
    DisplaySequent d = randomSequent(rng, 3);
    for (auto& rn : rules) {
      const DisplayRule* rule = calc.find(rn);
      DisplaySubst s;
      if (!match(rule->premises[0], d, s)) continue;
      DisplaySequent con = instantiate(rule->conclusion, s);
      CHECK(isomorphic(toLabeled(d, "w0"), toLabeled(con, "w0")));
      ++tried;
    }
  }
  CHECK(tried >= 1000);
}
