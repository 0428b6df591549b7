#pragma once

#include <cassert>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tpk {

// Connectives of the tense language: classical operators plus the four
// modalities [F] (all future), <F> (some future), [P] (all past), <P> (some past).
enum class Conn : uint8_t { Atom, Top, Bot, Not, And, Or, Imp, BoxF, DiaF, BoxP, DiaP };

inline bool isBinary(Conn c) { return c == Conn::And || c == Conn::Or || c == Conn::Imp; }
inline bool isUnary(Conn c) {
  return c == Conn::Not || c == Conn::BoxF || c == Conn::DiaF || c == Conn::BoxP || c == Conn::DiaP;
}

// Immutable formula tree with structural equality. Cheap to copy and share.
class Formula {
public:
  Formula() = default;  // empty handle; only containers may hold one

  static Formula atom(const std::string& name);
  static Formula top();
  static Formula bot();
  static Formula neg(Formula a);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula imp(Formula a, Formula b);
  static Formula boxF(Formula a);
  static Formula diaF(Formula a);
  static Formula boxP(Formula a);
  static Formula diaP(Formula a);
  static Formula unary(Conn c, Formula a);
  static Formula binary(Conn c, Formula a, Formula b);

  bool empty() const { return n_ == nullptr; }
  Conn kind() const;
  const std::string& atomName() const;
  const Formula& child() const;  // unary argument
  const Formula& left() const;
  const Formula& right() const;

  // Length per the recursive metric: atoms and constants count 1, every
  // connective adds 1.
  int length() const;
  size_t hash() const;

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }
  // Total structural order; used to keep multisets and printouts deterministic.
  int compare(const Formula& o) const;
  bool operator<(const Formula& o) const { return compare(o) < 0; }

  std::string str() const;

  // Collects atom names (with multiplicity) in left-to-right order.
  void atoms(std::vector<std::string>& out) const;

  struct Node;  // implementation detail; opaque

private:
  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

struct FormulaHash {
  size_t operator()(const Formula& f) const { return f.hash(); }
};

}  // namespace tpk
