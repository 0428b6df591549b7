#include "tpk/labeled.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace tpk {

namespace {

void insertSorted(std::vector<LabFml>& v, const LabFml& x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

bool removeSorted(std::vector<LabFml>& v, const LabFml& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || !(*it == x)) return false;
  v.erase(it);
  return true;
}

int countSorted(const std::vector<LabFml>& v, const LabFml& x) {
  auto r = std::equal_range(v.begin(), v.end(), x);
  return int(r.second - r.first);
}

}  // namespace

void LabeledSequent::addAnte(const Label& w, const Formula& f) { insertSorted(ante, {w, f}); }
void LabeledSequent::addSucc(const Label& w, const Formula& f) { insertSorted(succ, {w, f}); }
bool LabeledSequent::removeAnte(const Label& w, const Formula& f) { return removeSorted(ante, {w, f}); }
bool LabeledSequent::removeSucc(const Label& w, const Formula& f) { return removeSorted(succ, {w, f}); }
int LabeledSequent::countAnte(const Label& w, const Formula& f) const { return countSorted(ante, {w, f}); }
int LabeledSequent::countSucc(const Label& w, const Formula& f) const { return countSorted(succ, {w, f}); }

std::set<Label> LabeledSequent::labels() const {
  std::set<Label> out;
  for (auto& r : rel) {
    out.insert(r.from);
    out.insert(r.to);
  }
  for (auto& lf : ante) out.insert(lf.lab);
  for (auto& lf : succ) out.insert(lf.lab);
  return out;
}

std::set<Label> LabeledSequent::formulaLabels() const {
  std::set<Label> out;
  for (auto& lf : ante) out.insert(lf.lab);
  for (auto& lf : succ) out.insert(lf.lab);
  return out;
}

bool LabeledSequent::operator<(const LabeledSequent& o) const {
  if (rel != o.rel) return rel < o.rel;
  if (ante != o.ante) return ante < o.ante;
  return succ < o.succ;
}

std::string LabeledSequent::str() const {
  std::string out;
  bool first = true;
  for (auto& r : rel) {
    if (!first) out += ", ";
    out += "R " + r.from + " " + r.to;
    first = false;
  }
  for (auto& lf : ante) {
    if (!first) out += ", ";
    out += lf.lab + ": " + lf.fml.str();
    first = false;
  }
  out += first ? "=>" : " =>";
  first = true;
  for (auto& lf : succ) {
    out += first ? " " : ", ";
    out += lf.lab + ": " + lf.fml.str();
    first = false;
  }
  return out;
}

LabeledSequent compose(const LabeledSequent& a, const LabeledSequent& b) {
  LabeledSequent out = a;
  out.rel.insert(b.rel.begin(), b.rel.end());
  for (auto& lf : b.ante) insertSorted(out.ante, lf);
  for (auto& lf : b.succ) insertSorted(out.succ, lf);
  return out;
}

LabeledSequent labelSubstitute(const LabeledSequent& s, const Label& replace, const Label& by) {
  return renameLabels(s, {{replace, by}});
}

LabeledSequent renameLabels(const LabeledSequent& s, const std::map<Label, Label>& m) {
  auto ren = [&](const Label& l) {
    auto it = m.find(l);
    return it == m.end() ? l : it->second;
  };
  LabeledSequent out;
  for (auto& r : s.rel) out.rel.insert({ren(r.from), ren(r.to)});
  for (auto& lf : s.ante) out.addAnte(ren(lf.lab), lf.fml);
  for (auto& lf : s.succ) out.addSucc(ren(lf.lab), lf.fml);
  return out;
}

SequentGraph graphOf(const LabeledSequent& s) {
  SequentGraph g;
  for (auto& l : s.labels()) g.nodes[l];
  for (auto& lf : s.ante) g.nodes[lf.lab].ante.push_back(lf.fml);
  for (auto& lf : s.succ) g.nodes[lf.lab].succ.push_back(lf.fml);
  for (auto& r : s.rel) g.edges.push_back(r);
  return g;
}

namespace {

struct UnionFind {
  std::map<Label, Label> parent;
  const Label& find(const Label& x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return parent.find(x)->first;
    }
    if (it->second == x) return it->first;
    Label root = find(it->second);
    parent[x] = root;
    return parent.find(x)->second;
  }
  // Returns false if already joined (a cycle).
  bool join(const Label& a, const Label& b) {
    Label ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    return true;
  }
};

}  // namespace

PolytreeCheck polytreeCheck(const LabeledSequent& s) {
  if (s.rel.empty()) {
    std::set<Label> ls = s.formulaLabels();
    if (ls.size() > 1) return {false, "no relational atoms but formulas carry several labels"};
    return {true, ""};
  }
  std::set<Label> relLabels;
  for (auto& r : s.rel) {
    relLabels.insert(r.from);
    relLabels.insert(r.to);
  }
  for (auto& l : s.formulaLabels())
    if (!relLabels.count(l)) return {false, "label " + l + " occurs in a formula but not in a relational atom"};
  UnionFind uf;
  for (auto& r : s.rel) {
    if (r.from == r.to) return {false, "self loop R " + r.from + " " + r.to};
    if (!uf.join(r.from, r.to))
      return {false, "undirected cycle through R " + r.from + " " + r.to};
  }
  const Label& root = uf.find(*relLabels.begin());
  for (auto& l : relLabels)
    if (uf.find(l) != root) return {false, "graph is disconnected at label " + l};
  return {true, ""};
}

bool isPolytree(const LabeledSequent& s) { return polytreeCheck(s).ok; }

std::optional<PartitionError> checkPartition(const LabeledSequent& s, const Label& w, const LabeledSequent& a,
                                             const LabeledSequent& b) {
  if (compose(a, b) != s) return PartitionError{"parts do not compose to the sequent"};
  auto ca = polytreeCheck(a);
  if (!ca.ok) return PartitionError{"left part is not a polytree: " + ca.reason};
  auto cb = polytreeCheck(b);
  if (!cb.ok) return PartitionError{"right part is not a polytree: " + cb.reason};
  if (a.isEmpty() || b.isEmpty()) return std::nullopt;
  std::set<Label> la = a.labels(), lb = b.labels();
  std::vector<Label> inter;
  std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(inter));
  if (inter.size() != 1 || inter[0] != w)
    return PartitionError{"parts must share exactly the label " + w};
  return std::nullopt;
}

LabeledSequent subpolytree(const LabeledSequent& s, const Label& u, const Label& w) {
  if (!s.rel.count({w, u}) && !s.rel.count({u, w}))
    throw std::invalid_argument("no relational atom between " + w + " and " + u);
  // Collect the labels reachable from u without crossing the w-u edge.
  std::set<Label> comp{u};
  std::vector<Label> todo{u};
  while (!todo.empty()) {
    Label x = todo.back();
    todo.pop_back();
    for (auto& r : s.rel) {
      if ((r.from == w && r.to == u) || (r.from == u && r.to == w)) continue;
      Label other;
      if (r.from == x)
        other = r.to;
      else if (r.to == x)
        other = r.from;
      else
        continue;
      if (comp.insert(other).second) todo.push_back(other);
    }
  }
  LabeledSequent out;
  for (auto& r : s.rel) {
    if ((r.from == w && r.to == u) || (r.from == u && r.to == w)) continue;
    if (comp.count(r.from) && comp.count(r.to)) out.rel.insert(r);
  }
  for (auto& lf : s.ante)
    if (comp.count(lf.lab)) out.addAnte(lf.lab, lf.fml);
  for (auto& lf : s.succ)
    if (comp.count(lf.lab)) out.addSucc(lf.lab, lf.fml);
  return out;
}

namespace {

std::string payloadOf(const LabeledSequent& s, const Label& w) {
  std::vector<std::string> a, c;
  for (auto& lf : s.ante)
    if (lf.lab == w) a.push_back(lf.fml.str());
  for (auto& lf : s.succ)
    if (lf.lab == w) c.push_back(lf.fml.str());
  std::string out = "[";
  for (auto& x : a) out += x + ",";
  out += "=>";
  for (auto& x : c) out += x + ",";
  out += "]";
  return out;
}

struct TreeView {
  std::map<Label, std::vector<std::pair<char, Label>>> nb;  // '>' child of edge v->c, '<' of c->v
  std::set<Label> labels;
};

TreeView treeView(const LabeledSequent& s) {
  TreeView t;
  t.labels = s.labels();
  for (auto& l : t.labels) t.nb[l];
  for (auto& r : s.rel) {
    t.nb[r.from].push_back({'>', r.to});
    t.nb[r.to].push_back({'<', r.from});
  }
  return t;
}

// Canonical encoding of the subtree rooted at v (coming from parent), plus the
// labels in canonical visit order.
std::string encode(const LabeledSequent& s, const TreeView& t, const Label& v, const Label* parent,
                   std::vector<Label>* order) {
  std::vector<std::pair<std::string, Label>> kids;
  for (auto& [dir, c] : t.nb.at(v)) {
    if (parent && c == *parent) {
      // skip one occurrence of the parent edge only
      parent = nullptr;
      continue;
    }
    kids.push_back({std::string(1, dir) + encode(s, t, c, &v, nullptr), c});
  }
  std::sort(kids.begin(), kids.end());
  std::string out = "(" + payloadOf(s, v);
  for (auto& [e, c] : kids) out += e;
  out += ")";
  if (order) {
    order->push_back(v);
    for (auto& [e, c] : kids) encode(s, t, c, &v, order);
  }
  return out;
}

std::vector<Label> centers(const TreeView& t) {
  if (t.labels.empty()) return {};
  std::map<Label, int> deg;
  for (auto& [l, ns] : t.nb) deg[l] = int(ns.size());
  std::set<Label> alive = t.labels;
  std::vector<Label> layer;
  for (auto& l : alive)
    if (deg[l] <= 1) layer.push_back(l);
  while (alive.size() > 2) {
    std::vector<Label> next;
    for (auto& l : layer) {
      alive.erase(l);
      for (auto& [d, n] : t.nb.at(l))
        if (alive.count(n) && --deg[n] == 1) next.push_back(n);
    }
    layer = next;
  }
  return {alive.begin(), alive.end()};
}

}  // namespace

std::string canonicalForm(const LabeledSequent& s) {
  auto pc = polytreeCheck(s);
  if (!pc.ok) throw std::invalid_argument("canonicalForm: not a polytree: " + pc.reason);
  if (s.isEmpty()) return "()";
  TreeView t = treeView(s);
  if (t.labels.empty()) return "()";
  std::string best;
  for (auto& c : centers(t)) {
    std::string e = encode(s, t, c, nullptr, nullptr);
    if (best.empty() || e < best) best = e;
  }
  return best;
}

Label canonicalRoot(const LabeledSequent& s) {
  auto pc = polytreeCheck(s);
  if (!pc.ok) throw std::invalid_argument("canonicalRoot: not a polytree: " + pc.reason);
  TreeView t = treeView(s);
  if (t.labels.empty()) throw std::invalid_argument("canonicalRoot: sequent has no labels");
  Label bestLab;
  std::string best;
  for (auto& c : centers(t)) {
    std::string e = encode(s, t, c, nullptr, nullptr);
    if (best.empty() || e < best || (e == best && c < bestLab)) {
      best = e;
      bestLab = c;
    }
  }
  return bestLab;
}

namespace {

// Pair up the two canonical traversals. Equal canonical strings guarantee the
// walks have identical shape.
std::optional<std::map<Label, Label>> polytreeIso(const LabeledSequent& a, const LabeledSequent& b) {
  if (a.isEmpty() && b.isEmpty()) return std::map<Label, Label>{};
  if (a.isEmpty() != b.isEmpty()) return std::nullopt;
  TreeView ta = treeView(a), tb = treeView(b);
  if (ta.labels.size() != tb.labels.size()) return std::nullopt;
  std::string bestA;
  Label rootA;
  for (auto& c : centers(ta)) {
    std::string e = encode(a, ta, c, nullptr, nullptr);
    if (bestA.empty() || e < bestA) {
      bestA = e;
      rootA = c;
    }
  }
  for (auto& c : centers(tb)) {
    std::string e = encode(b, tb, c, nullptr, nullptr);
    if (e == bestA) {
      std::vector<Label> ordA, ordB;
      encode(a, ta, rootA, nullptr, &ordA);
      encode(b, tb, c, nullptr, &ordB);
      std::map<Label, Label> m;
      for (size_t i = 0; i < ordA.size(); ++i) m[ordA[i]] = ordB[i];
      return m;
    }
  }
  return std::nullopt;
}

// Backtracking fallback for arbitrary sequents; prunes on local signatures.
std::optional<std::map<Label, Label>> generalIso(const LabeledSequent& a, const LabeledSequent& b) {
  std::set<Label> las = a.labels(), lbs = b.labels();
  std::vector<Label> la(las.begin(), las.end());
  std::vector<Label> lb(lbs.begin(), lbs.end());
  if (la.size() != lb.size()) return std::nullopt;
  if (a.rel.size() != b.rel.size() || a.ante.size() != b.ante.size() || a.succ.size() != b.succ.size())
    return std::nullopt;
  auto sig = [](const LabeledSequent& s, const Label& l) {
    int in = 0, out = 0;
    for (auto& r : s.rel) {
      if (r.from == l) out++;
      if (r.to == l) in++;
    }
    return payloadOf(s, l) + "#" + std::to_string(in) + "/" + std::to_string(out);
  };
  std::map<Label, std::string> sa, sb;
  for (auto& l : la) sa[l] = sig(a, l);
  for (auto& l : lb) sb[l] = sig(b, l);
  std::map<Label, Label> m;
  std::set<Label> used;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == la.size()) {
      LabeledSequent ra = renameLabels(a, m);
      return ra == b;
    }
    const Label& x = la[i];
    for (auto& y : lb) {
      if (used.count(y) || sa[x] != sb[y]) continue;
      bool ok = true;
      for (auto& [px, py] : m) {
        if (a.rel.count({x, px}) != b.rel.count({y, py}) || a.rel.count({px, x}) != b.rel.count({py, y})) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      m[x] = y;
      used.insert(y);
      if (go(i + 1)) return true;
      m.erase(x);
      used.erase(y);
    }
    return false;
  };
  if (go(0)) return m;
  return std::nullopt;
}

}  // namespace

std::optional<std::map<Label, Label>> isomorphism(const LabeledSequent& a, const LabeledSequent& b) {
  if (isPolytree(a) && isPolytree(b)) return polytreeIso(a, b);
  return generalIso(a, b);
}

bool isomorphic(const LabeledSequent& a, const LabeledSequent& b) { return isomorphism(a, b).has_value(); }

}  // namespace tpk
