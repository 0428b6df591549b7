#pragma once

#include <optional>
#include <string>

#include "tpk/labeled.hpp"
#include "tpk/structure.hpp"

namespace tpk {

// Deterministic fresh-label source: w0, w1, ... skipping any reserved names.
class LabelAllocator {
public:
  explicit LabelAllocator(std::set<Label> reserved = {}) : reserved_(std::move(reserved)) {}
  Label fresh() {
    while (true) {
      Label l = "w" + std::to_string(next_++);
      if (!reserved_.count(l)) return l;
    }
  }
  void reserve(const Label& l) { reserved_.insert(l); }

private:
  std::set<Label> reserved_;
  int next_ = 0;
};

// L-translation: display sequents to labeled polytree sequents. Every bullet
// introduces an edge to or from a fresh label.
LabeledSequent toLabeledAnte(const Struct& x, const Label& w, LabelAllocator& alloc);  // L1
LabeledSequent toLabeledSucc(const Struct& x, const Label& w, LabelAllocator& alloc);  // L2
LabeledSequent toLabeled(const DisplaySequent& d, const Label& root = "w0");

// D-translation: labeled polytree sequents to display sequents, computed in a
// canonical form: flat formulas sorted, child blocks sorted by their printed
// canonical structure, chains left-associated. The default partition puts the
// whole sequent left of the turnstile.
Struct displayAnte(const LabeledSequent& s, const Label& w);  // D1
Struct displaySucc(const LabeledSequent& s, const Label& w);  // D2
DisplaySequent toDisplay(const LabeledSequent& s, const Label& root);
DisplaySequent toDisplay(const LabeledSequent& s, const Label& root, const LabeledSequent& left,
                         const LabeledSequent& right);

// Item lists making up displayAnte/displaySucc before chaining; exposed for
// the derivation machinery, which must aim at exactly these shapes.
std::vector<Struct> canonicalItems(const LabeledSequent& s, const Label& w, bool antePolarity);

// The canonical display sequent a given sequent normalizes to: the turnstile
// node is the L-image root.
DisplaySequent canonicalDisplay(const DisplaySequent& d);

}  // namespace tpk
