#pragma once

#include "tpk/labeled_calculus.hpp"

namespace tpk {

// Raised when a structural step hits one of the provably non-eliminable
// corners (see the library notes on ls over bare schematic labels).
class NonEliminable : public std::runtime_error {
public:
  explicit NonEliminable(const std::string& what) : std::runtime_error(what) {}
};

// The transformations below realize quantity-preserving admissibility of the
// structural rules on structural-free proofs carrying explicit substitutions.
// Every function returns a proof with quantity at most the input's that
// checks under the same calculus.

// Fills in inferred substitutions so every node carries a total one.
LabeledProof resolveSubsts(const LabeledCalculus& calc, const LabeledProof& p, bool allowStructural = false);

// Injectively renames the conclusion's labels by m; labels internal to the
// proof are moved out of the way of `avoid` and of m's range.
LabeledProof renameProof(const LabeledCalculus& calc, const LabeledProof& p,
                         const std::map<Label, Label>& m, const std::set<Label>& avoid = {});

// Weakening: from a proof of s to a proof of s (+) extra. Every extra must be
// a polytree overlapping the host sequent in at most one label.
LabeledProof weakenProof(const LabeledCalculus& calc, const LabeledProof& p, const LabeledSequent& extra);

// Label substitution (keep/merge) under the strict ls side condition.
LabeledProof substProof(const LabeledCalculus& calc, const LabeledProof& p, const Label& keep,
                        const Label& merge);

// Contractions of one duplicated labeled formula.
LabeledProof contractLeft(const LabeledCalculus& calc, const LabeledProof& p, const Label& w,
                          const Formula& f);
LabeledProof contractRight(const LabeledCalculus& calc, const LabeledProof& p, const Label& w,
                           const Formula& f);

// Removes every explicit ls/w/cl/cr step by upward permutation. The input
// must check with allowStructural and be strict; the output checks without
// structural steps, stays strict, and does not grow in quantity.
LabeledProof eliminateStructural(const LabeledCalculus& calc, const LabeledProof& p);

}  // namespace tpk
