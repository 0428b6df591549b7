#include "tpk/formula.hpp"

#include <functional>

namespace tpk {

struct Formula::Node {
  Conn k;
  std::string atom;
  Formula a, b;
  int len = 1;
  size_t h = 0;
};

namespace {

size_t mix(size_t a, size_t b) { return a * 1000003u ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)); }

std::shared_ptr<const Formula::Node> mkNode(Conn k, std::string atom, Formula a, Formula b) {
  auto n = std::make_shared<Formula::Node>();
  n->k = k;
  n->atom = std::move(atom);
  n->len = 1;
  size_t h = mix(static_cast<size_t>(k) + 11, std::hash<std::string>{}(n->atom));
  if (!a.empty()) {
    n->len += a.length();
    h = mix(h, a.hash());
  }
  if (!b.empty()) {
    n->len += b.length();
    h = mix(h, b.hash());
  }
  n->h = h;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Formula Formula::atom(const std::string& name) { return Formula(mkNode(Conn::Atom, name, {}, {})); }
Formula Formula::top() { return Formula(mkNode(Conn::Top, "", {}, {})); }
Formula Formula::bot() { return Formula(mkNode(Conn::Bot, "", {}, {})); }
Formula Formula::neg(Formula a) { return unary(Conn::Not, std::move(a)); }
Formula Formula::conj(Formula a, Formula b) { return binary(Conn::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Conn::Or, std::move(a), std::move(b)); }
Formula Formula::imp(Formula a, Formula b) { return binary(Conn::Imp, std::move(a), std::move(b)); }
Formula Formula::boxF(Formula a) { return unary(Conn::BoxF, std::move(a)); }
Formula Formula::diaF(Formula a) { return unary(Conn::DiaF, std::move(a)); }
Formula Formula::boxP(Formula a) { return unary(Conn::BoxP, std::move(a)); }
Formula Formula::diaP(Formula a) { return unary(Conn::DiaP, std::move(a)); }

Formula Formula::unary(Conn c, Formula a) {
  assert(isUnary(c) && !a.empty());
  return Formula(mkNode(c, "", std::move(a), {}));
}

Formula Formula::binary(Conn c, Formula a, Formula b) {
  assert(isBinary(c) && !a.empty() && !b.empty());
  return Formula(mkNode(c, "", std::move(a), std::move(b)));
}

Conn Formula::kind() const { return n_->k; }
const std::string& Formula::atomName() const { return n_->atom; }
const Formula& Formula::child() const { return n_->a; }
const Formula& Formula::left() const { return n_->a; }
const Formula& Formula::right() const { return n_->b; }
int Formula::length() const { return n_->len; }
size_t Formula::hash() const { return n_->h; }

bool Formula::operator==(const Formula& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  return compare(o) == 0;
}

int Formula::compare(const Formula& o) const {
  if (n_ == o.n_) return 0;
  if (!n_) return -1;
  if (!o.n_) return 1;
  if (n_->k != o.n_->k) return n_->k < o.n_->k ? -1 : 1;
  if (int c = n_->atom.compare(o.n_->atom)) return c < 0 ? -1 : 1;
  bool la = !n_->a.empty(), lb = !o.n_->a.empty();
  if (la != lb) return la ? 1 : -1;
  if (la)
    if (int c = n_->a.compare(o.n_->a)) return c;
  bool ra = !n_->b.empty(), rb = !o.n_->b.empty();
  if (ra != rb) return ra ? 1 : -1;
  if (ra)
    if (int c = n_->b.compare(o.n_->b)) return c;
  return 0;
}

namespace {

// Precedence: unary binds tightest, then &, then |, then ->.
int prec(Conn c) {
  switch (c) {
    case Conn::Imp: return 1;
    case Conn::Or: return 2;
    case Conn::And: return 3;
    default: return 4;
  }
}

void print(const Formula& f, std::string& out, int ctx) {
  Conn k = f.kind();
  switch (k) {
    case Conn::Atom: out += f.atomName(); return;
    case Conn::Top: out += "top"; return;
    case Conn::Bot: out += "bot"; return;
    case Conn::Not:
    case Conn::BoxF:
    case Conn::DiaF:
    case Conn::BoxP:
    case Conn::DiaP: {
      switch (k) {
        case Conn::Not: out += "~"; break;
        case Conn::BoxF: out += "[F]"; break;
        case Conn::DiaF: out += "<F>"; break;
        case Conn::BoxP: out += "[P]"; break;
        default: out += "<P>"; break;
      }
      print(f.child(), out, 4);
      return;
    }
    default: break;
  }
  int p = prec(k);
  bool paren = p < ctx;
  if (paren) out += "(";
  const char* op = k == Conn::And ? " & " : k == Conn::Or ? " | " : " -> ";
  // & and | are left associative, -> is right associative
  if (k == Conn::Imp) {
    print(f.left(), out, p + 1);
    out += op;
    print(f.right(), out, p);
  } else {
    print(f.left(), out, p);
    out += op;
    print(f.right(), out, p + 1);
  }
  if (paren) out += ")";
}

}  // namespace

std::string Formula::str() const {
  if (empty()) return "<null>";
  std::string out;
  print(*this, out, 0);
  return out;
}

void Formula::atoms(std::vector<std::string>& out) const {
  if (kind() == Conn::Atom) {
    out.push_back(atomName());
    return;
  }
  if (!n_->a.empty()) n_->a.atoms(out);
  if (!n_->b.empty()) n_->b.atoms(out);
}

}  // namespace tpk
