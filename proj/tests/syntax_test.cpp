#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tpk/axiom.hpp"
#include "tpk/parse.hpp"
#include "tpk/semantics.hpp"
#include "tpk/structure.hpp"

using namespace tpk;

namespace {

Formula randomFormula(std::mt19937_64& rng, int depth, const std::vector<std::string>& atoms) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  switch (pick(rng)) {
    case 0: return Formula::atom(atoms[rng() % atoms.size()]);
    case 1: return Formula::top();
    case 2: return Formula::bot();
    case 3: return Formula::neg(randomFormula(rng, depth - 1, atoms));
    case 4: return Formula::conj(randomFormula(rng, depth - 1, atoms), randomFormula(rng, depth - 1, atoms));
    case 5: return Formula::disj(randomFormula(rng, depth - 1, atoms), randomFormula(rng, depth - 1, atoms));
    case 6: return Formula::imp(randomFormula(rng, depth - 1, atoms), randomFormula(rng, depth - 1, atoms));
    case 7: return Formula::boxF(randomFormula(rng, depth - 1, atoms));
    case 8: return Formula::diaF(randomFormula(rng, depth - 1, atoms));
    case 9: return Formula::boxP(randomFormula(rng, depth - 1, atoms));
    default: return Formula::diaP(randomFormula(rng, depth - 1, atoms));
  }
}

// Independent node-count oracle for the length metric: every constructor
// except parentheses counts one.
int lengthOracle(const Formula& f) {
  switch (f.kind()) {
    case Conn::Atom:
    case Conn::Top:
    case Conn::Bot: return 1;
    case Conn::Not:
    case Conn::BoxF:
    case Conn::DiaF:
    case Conn::BoxP:
    case Conn::DiaP: return 1 + lengthOracle(f.child());
    default: return 1 + lengthOracle(f.left()) + lengthOracle(f.right());
  }
}

}  // namespace

TEST_CASE("parsing basics") {
  CHECK(parseFormula("p") == Formula::atom("p"));
  CHECK(parseFormula("<F>p -> <F>p") ==
        Formula::imp(Formula::diaF(Formula::atom("p")), Formula::diaF(Formula::atom("p"))));
  CHECK_THROWS_AS(parseFormula("(&p"), ParseError);
  // precedence: unary > & > | > ->, -> right associative
  CHECK(parseFormula("~p & q | r -> s -> t") ==
        Formula::imp(Formula::disj(Formula::conj(Formula::neg(Formula::atom("p")), Formula::atom("q")),
                                   Formula::atom("r")),
                     Formula::imp(Formula::atom("s"), Formula::atom("t"))));
  CHECK(parseFormula("[F]p & [P]q") ==
        Formula::conj(Formula::boxF(Formula::atom("p")), Formula::boxP(Formula::atom("q"))));
}

TEST_CASE("parse errors carry offsets") {
  try {
    parseFormula("p & ");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
}

TEST_CASE("formula round trip on random ASTs") {
  std::mt19937_64 rng(7);
  std::vector<std::string> atoms{"p", "q", "r", "s"};
  for (int i = 0; i < 500; ++i) {
    Formula f = randomFormula(rng, 8, atoms);
    CHECK(parseFormula(f.str()) == f);
  }
}

TEST_CASE("formula length") {
  CHECK(parseFormula("p").length() == 1);
  CHECK(parseFormula("p & q").length() == 3);
  CHECK(parseFormula("[F]<F>p").length() == 3);
  std::mt19937_64 rng(11);
  std::vector<std::string> atoms{"p", "q"};
  for (int i = 0; i < 200; ++i) {
    Formula f = randomFormula(rng, 7, atoms);
    CHECK(f.length() == lengthOracle(f));
    CHECK(f.length() >= 1);
  }
}

TEST_CASE("structure parsing and printing") {
  Struct s = parseStruct("@(*p o <P>q)");
  CHECK(s.kind() == SKind::Bullet);
  CHECK(s.str() == "@(*p o <P>q)");
  CHECK(parseStruct(s.str()) == s);
  DisplaySequent d = parseDisplaySequent("I o *I o @(<P>q o *p) |- *I o I o *@*(*q o I)");
  CHECK(parseDisplaySequent(d.str()) == d);
  CHECK(d.str() == "I o *I o @(<P>q o *p) |- *I o I o *@*(*q o I)");
  // structure length
  CHECK(parseStruct("I").length() == 1);
  CHECK(parseStruct("*p").length() == 2);
  CHECK(parseStruct("p o q").length() == 3);
  CHECK(parseDisplaySequent("p |- p").length() == 2);
}

TEST_CASE("labeled sequent parsing") {
  LabeledSequent s = parseLabeledSequent("R u w, R v w, u: <P>q, v: q => u: p");
  CHECK(s.rel.size() == 2);
  CHECK(s.ante.size() == 2);
  CHECK(s.succ.size() == 1);
  CHECK(parseLabeledSequent(s.str()) == s);
  LabeledSequent e = parseLabeledSequent("=>");
  CHECK(e.isEmpty());
  CHECK(parseLabeledSequent(e.str()) == e);
}

TEST_CASE("substructures") {
  auto sst = substructures(parseStruct("@(*p o q)"));
  CHECK(sst.size() == 5);
  CHECK(sst.count(parseStruct("@(*p o q)")));
  CHECK(sst.count(parseStruct("*p o q")));
  CHECK(sst.count(parseStruct("*p")));
  CHECK(sst.count(parseStruct("p")));
  CHECK(sst.count(parseStruct("q")));
  auto sst2 = substructures(parseStruct("*I o (p o q)"));
  CHECK(sst2.size() == 6);
  CHECK(substructures(parseStruct("I")).size() == 1);
}

TEST_CASE("tau translation") {
  CHECK(tau(parseDisplaySequent("@p |- q")) == parseFormula("<P>p -> q"));
  CHECK(tau(parseDisplaySequent("I |- top")) == parseFormula("top -> top"));
  CHECK(tau(parseDisplaySequent("*p |- *q")) == parseFormula("~p -> ~q"));
}

TEST_CASE("polarity") {
  DisplaySequent d = parseDisplaySequent("@(*a o b) |- *I o (c o d)");
  CHECK(polarity(d, {0, {0, 1}}) == Polarity::APart);           // b
  CHECK(polarity(d, {1, {1, 0}}) == Polarity::CPart);           // c
  CHECK(polarity(d, {0, {0, 0, 0}}) == Polarity::CPart);        // a under one star
  CHECK(polarity(parseDisplaySequent("*a |- b"), {0, {0}}) == Polarity::CPart);
  CHECK(polarity(d, {0, {}}) == Polarity::APart);
}

TEST_CASE("primitive axiom validation") {
  auto ok = validatePrimitiveAxiom(parseFormula("<F><F>p -> <F>p"));
  REQUIRE(ok.ok());
  CHECK(ok.value->antecedent == parseFormula("<F><F>p"));
  CHECK(ok.value->succedents.size() == 1);

  auto ok2 = validatePrimitiveAxiom(parseFormula("<P><F>p -> <F>p"));
  CHECK(ok2.ok());

  auto bad = validatePrimitiveAxiom(parseFormula("p -> [F]p"));
  CHECK(!bad.ok());
  CHECK(bad.rejection->offending == parseFormula("[F]p"));

  auto dup = validatePrimitiveAxiom(parseFormula("p & <F>p -> p"));
  CHECK(!dup.ok());
}

TEST_CASE("axiom normalization") {
  auto r = normalizeAxiom(parseFormula("(p | q) -> <F>p"));
  REQUIRE(r.ok());
  REQUIRE(r.value->size() == 2);
  CHECK((*r.value)[0].asFormula() == parseFormula("p -> <F>p"));
  CHECK((*r.value)[1].asFormula() == parseFormula("q -> <F>p"));

  auto fix = normalizeAxiom(parseFormula("<F><F>p -> <F>p"));
  REQUIRE(fix.ok());
  CHECK(fix.value->size() == 1);
  CHECK((*fix.value)[0].asFormula() == parseFormula("<F><F>p -> <F>p"));

  // every output passes validation
  auto r2 = normalizeAxiom(parseFormula("<F>(p | q) -> <F>p | <F>q"));
  REQUIRE(r2.ok());
  for (auto& ax : *r2.value) CHECK(validatePrimitiveAxiom(ax.asFormula()).ok());
}

TEST_CASE("normalization outputs are equivalent to the input") {
  // Brute-force equivalence over all models with <= 3 worlds on a fixed frame
  // enumeration, via the semantics oracle.
  std::mt19937_64 rng(3);
  std::vector<std::string> cases{
      "(p | q) -> <F>p",
      "<F>(p | q) -> <F>p | <F>q",
      "<P>(p | q & r) -> <P>p | <F>(q & r)",
      "p & (q | r) -> <F>(p & q)",
  };
  for (auto& text : cases) {
    Formula f = parseFormula(text);
    auto r = normalizeAxiom(f);
    REQUIRE(r.ok());
    for (int trial = 0; trial < 300; ++trial) {
      RelationalModel m = randomModel(rng, 1 + int(rng() % 3), {"p", "q", "r"});
      for (auto& w : m.worlds) {
        bool lhs = satisfies(m, w, f);
        bool rhs = true;
        for (auto& ax : *r.value) rhs = rhs && satisfies(m, w, ax.asFormula());
        CHECK(lhs == rhs);
      }
    }
  }
}
