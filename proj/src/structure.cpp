#include "tpk/structure.hpp"

#include <functional>
#include <stdexcept>

namespace tpk {

struct Struct::Node {
  SKind k;
  Formula f;
  Struct a, b;
  int len = 1;
  size_t h = 0;
};

namespace {

size_t mix(size_t a, size_t b) { return a * 1000003u ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)); }

std::shared_ptr<const Struct::Node> mkNode(SKind k, Formula f, Struct a, Struct b) {
  auto n = std::make_shared<Struct::Node>();
  n->k = k;
  n->f = std::move(f);
  size_t h = static_cast<size_t>(k) + 101;
  n->len = 1;
  if (!n->f.empty()) h = mix(h, n->f.hash());
  if (!a.empty()) {
    n->len += a.length();
    h = mix(h, a.hash());
  }
  if (!b.empty()) {
    n->len += b.length();
    h = mix(h, b.hash());
  }
  if (k == SKind::Fml) n->len = 1;
  n->h = h;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Struct Struct::fml(Formula f) { return Struct(mkNode(SKind::Fml, std::move(f), {}, {})); }
Struct Struct::unit() { return Struct(mkNode(SKind::I, {}, {}, {})); }
Struct Struct::star(Struct a) { return Struct(mkNode(SKind::Star, {}, std::move(a), {})); }
Struct Struct::bullet(Struct a) { return Struct(mkNode(SKind::Bullet, {}, std::move(a), {})); }
Struct Struct::comp(Struct a, Struct b) { return Struct(mkNode(SKind::Comp, {}, std::move(a), std::move(b))); }

Struct Struct::chain(const std::vector<Struct>& items) {
  if (items.empty()) return unit();
  Struct acc = items[0];
  for (size_t i = 1; i < items.size(); ++i) acc = comp(acc, items[i]);
  return acc;
}

SKind Struct::kind() const { return n_->k; }
const Formula& Struct::formula() const { return n_->f; }
const Struct& Struct::child() const { return n_->a; }
const Struct& Struct::left() const { return n_->a; }
const Struct& Struct::right() const { return n_->b; }
int Struct::length() const { return n_->len; }
size_t Struct::hash() const { return n_->h; }

bool Struct::operator==(const Struct& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  return compare(o) == 0;
}

int Struct::compare(const Struct& o) const {
  if (n_ == o.n_) return 0;
  if (!n_) return -1;
  if (!o.n_) return 1;
  if (n_->k != o.n_->k) return n_->k < o.n_->k ? -1 : 1;
  if (n_->k == SKind::Fml) return n_->f.compare(o.n_->f);
  if (!n_->a.empty())
    if (int c = n_->a.compare(o.n_->a)) return c;
  if (!n_->b.empty())
    if (int c = n_->b.compare(o.n_->b)) return c;
  return 0;
}

namespace {

bool tightFormula(const Formula& f) { return !isBinary(f.kind()); }

void print(const Struct& s, std::string& out, bool atomic) {
  switch (s.kind()) {
    case SKind::I: out += "I"; return;
    case SKind::Fml:
      if (tightFormula(s.formula())) {
        out += s.formula().str();
      } else {
        out += "(";
        out += s.formula().str();
        out += ")";
      }
      return;
    case SKind::Star:
      out += "*";
      print(s.child(), out, true);
      return;
    case SKind::Bullet:
      out += "@";
      print(s.child(), out, true);
      return;
    case SKind::Comp: {
      if (atomic) out += "(";
      print(s.left(), out, false);
      out += " o ";
      print(s.right(), out, true);  // o is left associative
      if (atomic) out += ")";
      return;
    }
  }
}

}  // namespace

std::string Struct::str() const {
  if (empty()) return "<null>";
  std::string out;
  print(*this, out, false);
  return out;
}

const Struct* Struct::at(const std::vector<int>& path) const {
  const Struct* cur = this;
  for (int step : path) {
    switch (cur->kind()) {
      case SKind::Star:
      case SKind::Bullet:
        if (step != 0) return nullptr;
        cur = &cur->child();
        break;
      case SKind::Comp:
        if (step == 0)
          cur = &cur->left();
        else if (step == 1)
          cur = &cur->right();
        else
          return nullptr;
        break;
      default:
        return nullptr;
    }
  }
  return cur;
}

Struct Struct::replaceAt(const std::vector<int>& path, const Struct& s) const {
  std::function<Struct(const Struct&, size_t)> go = [&](const Struct& cur, size_t i) -> Struct {
    if (i == path.size()) return s;
    switch (cur.kind()) {
      case SKind::Star: return star(go(cur.child(), i + 1));
      case SKind::Bullet: return bullet(go(cur.child(), i + 1));
      case SKind::Comp:
        if (path[i] == 0) return comp(go(cur.left(), i + 1), cur.right());
        return comp(cur.left(), go(cur.right(), i + 1));
      default: throw std::invalid_argument("path leaves the structure");
    }
  };
  return go(*this, 0);
}

std::set<Struct> substructures(const Struct& s) {
  std::set<Struct> out;
  std::function<void(const Struct&)> go = [&](const Struct& cur) {
    out.insert(cur);
    switch (cur.kind()) {
      case SKind::Star:
      case SKind::Bullet: go(cur.child()); break;
      case SKind::Comp:
        go(cur.left());
        go(cur.right());
        break;
      default: break;
    }
  };
  go(s);
  return out;
}

Formula tau1(const Struct& s) {
  switch (s.kind()) {
    case SKind::Fml: return s.formula();
    case SKind::I: return Formula::top();
    case SKind::Star: return Formula::neg(tau2(s.child()));
    case SKind::Bullet: return Formula::diaP(tau1(s.child()));
    case SKind::Comp: return Formula::conj(tau1(s.left()), tau1(s.right()));
  }
  throw std::logic_error("tau1");
}

Formula tau2(const Struct& s) {
  switch (s.kind()) {
    case SKind::Fml: return s.formula();
    case SKind::I: return Formula::bot();
    case SKind::Star: return Formula::neg(tau1(s.child()));
    case SKind::Bullet: return Formula::boxF(tau2(s.child()));
    case SKind::Comp: return Formula::disj(tau2(s.left()), tau2(s.right()));
  }
  throw std::logic_error("tau2");
}

Formula tau(const DisplaySequent& d) { return Formula::imp(tau1(d.ante), tau2(d.succ)); }

Polarity polarity(const DisplaySequent& d, const SeqPath& at) {
  const Struct& root = at.side == 0 ? d.ante : d.succ;
  const Struct* cur = &root;
  bool aPart = at.side == 0;
  for (int step : at.path) {
    switch (cur->kind()) {
      case SKind::Star:
        if (step != 0) throw std::invalid_argument("bad path");
        aPart = !aPart;
        cur = &cur->child();
        break;
      case SKind::Bullet:
        if (step != 0) throw std::invalid_argument("bad path");
        cur = &cur->child();
        break;
      case SKind::Comp:
        if (step != 0 && step != 1) throw std::invalid_argument("bad path");
        cur = step == 0 ? &cur->left() : &cur->right();
        break;
      default: throw std::invalid_argument("bad path");
    }
  }
  return aPart ? Polarity::APart : Polarity::CPart;
}

}  // namespace tpk
