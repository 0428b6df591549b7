#include "tpk/parse.hpp"

#include <cctype>

namespace tpk {

namespace {

enum class Tok {
  Ident,   // atom or label
  Top, Bot, Unit /*I*/, Comp /*o*/, Rel /*R*/,
  Not, And, Or, Imp,
  BoxF, DiaF, BoxP, DiaP,
  Star, Bullet,
  LPar, RPar,
  Turnstile /*|-*/, Arrow /*=>*/, Colon, Comma,
  End,
};

struct Token {
  Tok t;
  std::string text;
  size_t pos;
};

struct Lexer {
  const std::string& s;
  size_t i = 0;
  std::vector<Token> toks;

  explicit Lexer(const std::string& s) : s(s) { run(); }

  [[noreturn]] void fail(size_t at, const std::string& expected) {
    std::string got = at < s.size() ? std::string(1, s[at]) : "<end>";
    throw ParseError(at, expected, got);
  }

  void run() {
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      size_t start = i;
      if (std::islower(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        std::string w = s.substr(i, j - i);
        i = j;
        if (w == "top")
          toks.push_back({Tok::Top, w, start});
        else if (w == "bot")
          toks.push_back({Tok::Bot, w, start});
        else if (w == "o")
          toks.push_back({Tok::Comp, w, start});
        else
          toks.push_back({Tok::Ident, w, start});
        continue;
      }
      if (c == 'I') {
        toks.push_back({Tok::Unit, "I", start});
        ++i;
        continue;
      }
      if (c == 'R') {
        toks.push_back({Tok::Rel, "R", start});
        ++i;
        continue;
      }
      switch (c) {
        case '~': toks.push_back({Tok::Not, "~", start}); ++i; continue;
        case '&': toks.push_back({Tok::And, "&", start}); ++i; continue;
        case '*': toks.push_back({Tok::Star, "*", start}); ++i; continue;
        case '@': toks.push_back({Tok::Bullet, "@", start}); ++i; continue;
        case '(': toks.push_back({Tok::LPar, "(", start}); ++i; continue;
        case ')': toks.push_back({Tok::RPar, ")", start}); ++i; continue;
        case ':': toks.push_back({Tok::Colon, ":", start}); ++i; continue;
        case ',': toks.push_back({Tok::Comma, ",", start}); ++i; continue;
        case '|':
          if (i + 1 < s.size() && s[i + 1] == '-') {
            toks.push_back({Tok::Turnstile, "|-", start});
            i += 2;
          } else {
            toks.push_back({Tok::Or, "|", start});
            ++i;
          }
          continue;
        case '-':
          if (i + 1 < s.size() && s[i + 1] == '>') {
            toks.push_back({Tok::Imp, "->", start});
            i += 2;
            continue;
          }
          fail(i, "'->'");
        case '=':
          if (i + 1 < s.size() && s[i + 1] == '>') {
            toks.push_back({Tok::Arrow, "=>", start});
            i += 2;
            continue;
          }
          fail(i, "'=>'");
        case '[':
          if (i + 2 < s.size() && s[i + 2] == ']' && (s[i + 1] == 'F' || s[i + 1] == 'P')) {
            toks.push_back({s[i + 1] == 'F' ? Tok::BoxF : Tok::BoxP, s.substr(i, 3), start});
            i += 3;
            continue;
          }
          fail(i, "'[F]' or '[P]'");
        case '<':
          if (i + 2 < s.size() && s[i + 2] == '>' && (s[i + 1] == 'F' || s[i + 1] == 'P')) {
            toks.push_back({s[i + 1] == 'F' ? Tok::DiaF : Tok::DiaP, s.substr(i, 3), start});
            i += 3;
            continue;
          }
          fail(i, "'<F>' or '<P>'");
        default: fail(i, "a token");
      }
    }
    toks.push_back({Tok::End, "", s.size()});
  }
};

struct Parser {
  std::vector<Token> toks;
  size_t k = 0;

  explicit Parser(const std::string& text) : toks(Lexer(text).toks) {}

  const Token& peek() const { return toks[k]; }
  Token eat() { return toks[k++]; }
  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = peek();
    throw ParseError(t.pos, expected, t.t == Tok::End ? "<end>" : t.text);
  }
  Token expect(Tok t, const std::string& what) {
    if (peek().t != t) fail(what);
    return eat();
  }

  // formula := imp ; imp := or ('->' imp)? ; or := and ('|' and)* ;
  // and := unary ('&' unary)* ; unary := '~'u | '[F]'u | ... | primary
  Formula formula() {
    Formula lhs = orFormula();
    if (peek().t == Tok::Imp) {
      eat();
      return Formula::imp(lhs, formula());
    }
    return lhs;
  }

  Formula orFormula() {
    Formula lhs = andFormula();
    while (peek().t == Tok::Or) {
      eat();
      lhs = Formula::disj(lhs, andFormula());
    }
    return lhs;
  }

  Formula andFormula() {
    Formula lhs = unaryFormula();
    while (peek().t == Tok::And) {
      eat();
      lhs = Formula::conj(lhs, unaryFormula());
    }
    return lhs;
  }

  Formula unaryFormula() {
    switch (peek().t) {
      case Tok::Not: eat(); return Formula::neg(unaryFormula());
      case Tok::BoxF: eat(); return Formula::boxF(unaryFormula());
      case Tok::DiaF: eat(); return Formula::diaF(unaryFormula());
      case Tok::BoxP: eat(); return Formula::boxP(unaryFormula());
      case Tok::DiaP: eat(); return Formula::diaP(unaryFormula());
      default: return primaryFormula();
    }
  }

  Formula primaryFormula() {
    switch (peek().t) {
      case Tok::Ident: return Formula::atom(eat().text);
      case Tok::Top: eat(); return Formula::top();
      case Tok::Bot: eat(); return Formula::bot();
      case Tok::LPar: {
        eat();
        Formula f = formula();
        expect(Tok::RPar, "')'");
        return f;
      }
      default: fail("a formula");
    }
  }

  // struct := unaryStruct ('o' unaryStruct)*  (left associative)
  Struct structure() {
    Struct lhs = unaryStruct();
    while (peek().t == Tok::Comp) {
      eat();
      lhs = Struct::comp(lhs, unaryStruct());
    }
    return lhs;
  }

  Struct unaryStruct() {
    switch (peek().t) {
      case Tok::Star: eat(); return Struct::star(unaryStruct());
      case Tok::Bullet: eat(); return Struct::bullet(unaryStruct());
      case Tok::Unit: eat(); return Struct::unit();
      case Tok::LPar: {
        // Parenthesized structure; a lone formula inside parses as a leaf.
        eat();
        Struct s = structure();
        expect(Tok::RPar, "')'");
        return s;
      }
      default: return Struct::fml(formula());
    }
  }

  DisplaySequent displaySequent() {
    Struct a = structure();
    expect(Tok::Turnstile, "'|-'");
    Struct c = structure();
    return {a, c};
  }

  LabeledSequent labeledSequent() {
    LabeledSequent out;
    if (peek().t != Tok::Arrow) {
      while (true) {
        if (peek().t == Tok::Rel) {
          eat();
          std::string a = expect(Tok::Ident, "a label").text;
          std::string b = expect(Tok::Ident, "a label").text;
          out.addRel(a, b);
        } else {
          std::string lab = expect(Tok::Ident, "a label or 'R'").text;
          expect(Tok::Colon, "':'");
          out.addAnte(lab, formula());
        }
        if (peek().t == Tok::Comma) {
          eat();
          continue;
        }
        break;
      }
    }
    expect(Tok::Arrow, "'=>'");
    if (peek().t != Tok::End) {
      while (true) {
        std::string lab = expect(Tok::Ident, "a label").text;
        expect(Tok::Colon, "':'");
        out.addSucc(lab, formula());
        if (peek().t == Tok::Comma) {
          eat();
          continue;
        }
        break;
      }
    }
    return out;
  }

  void end() {
    if (peek().t != Tok::End) fail("end of input");
  }
};

}  // namespace

Formula parseFormula(const std::string& text) {
  Parser p(text);
  Formula f = p.formula();
  p.end();
  return f;
}

Struct parseStruct(const std::string& text) {
  Parser p(text);
  Struct s = p.structure();
  p.end();
  return s;
}

DisplaySequent parseDisplaySequent(const std::string& text) {
  Parser p(text);
  DisplaySequent d = p.displaySequent();
  p.end();
  return d;
}

LabeledSequent parseLabeledSequent(const std::string& text) {
  Parser p(text);
  LabeledSequent s = p.labeledSequent();
  p.end();
  return s;
}

std::vector<Formula> parseAxiomFile(const std::string& content) {
  std::vector<Formula> out;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (size_t h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) out.push_back(parseFormula(line));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace tpk
