#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tpk/formula.hpp"

namespace tpk {

// Display structures: X ::= A | I | *X | @X | (X o X).
// `*` is structural negation, `@` the structural modality, `o` structural
// conjunction/disjunction depending on the side it occurs on.
enum class SKind : uint8_t { Fml, I, Star, Bullet, Comp };

class Struct {
public:
  Struct() = default;

  static Struct fml(Formula f);
  static Struct unit();  // I
  static Struct star(Struct a);
  static Struct bullet(Struct a);
  static Struct comp(Struct a, Struct b);
  // Left-associated chain x1 o x2 o ... o xn; a single item is returned as is.
  static Struct chain(const std::vector<Struct>& items);

  bool empty() const { return n_ == nullptr; }
  SKind kind() const;
  const Formula& formula() const;
  const Struct& child() const;  // Star/Bullet argument
  const Struct& left() const;
  const Struct& right() const;

  int length() const;  // l(A)=l(I)=1, unary +1, comp +1
  size_t hash() const;
  bool operator==(const Struct& o) const;
  bool operator!=(const Struct& o) const { return !(*this == o); }
  int compare(const Struct& o) const;
  bool operator<(const Struct& o) const { return compare(o) < 0; }

  std::string str() const;

  // Substructure at a path; each step is 0 (unary child / left) or 1 (right).
  const Struct* at(const std::vector<int>& path) const;
  Struct replaceAt(const std::vector<int>& path, const Struct& s) const;

  struct Node;  // implementation detail; opaque

private:
  explicit Struct(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

struct DisplaySequent {
  Struct ante, succ;

  int length() const { return ante.length() + succ.length(); }
  bool operator==(const DisplaySequent& o) const { return ante == o.ante && succ == o.succ; }
  bool operator!=(const DisplaySequent& o) const { return !(*this == o); }
  std::string str() const { return ante.str() + " |- " + succ.str(); }
};

// sst(X): the set of substructures per the five defining clauses.
std::set<Struct> substructures(const Struct& s);

// tau: reads a display sequent as a formula, tau(X |- Y) = tau1(X) -> tau2(Y).
Formula tau1(const Struct& s);
Formula tau2(const Struct& s);
Formula tau(const DisplaySequent& d);

// Positions inside a display sequent. side 0 = antecedent, 1 = succedent.
struct SeqPath {
  int side = 0;
  std::vector<int> path;
};

enum class Polarity { APart, CPart };

// Polarity of the substructure occurrence addressed by `at`: a-part iff it can
// be displayed as the whole antecedent. Computed positionally (star flips,
// succedent side starts flipped). Throws std::invalid_argument on a bad path.
Polarity polarity(const DisplaySequent& d, const SeqPath& at);

}  // namespace tpk
