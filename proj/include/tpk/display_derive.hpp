#pragma once

#include "tpk/display_calculus.hpp"
#include "tpk/notation.hpp"

namespace tpk {

// A chain of single-premise rule applications from an open top sequent down
// to a bottom sequent. All derivation generators produce chains.
struct ChainStep {
  std::string rule;
  bool up = false;
  DisplaySubst sub;
  DisplaySequent conclusion;
};

struct Chain {
  DisplaySequent top;
  std::vector<ChainStep> steps;
  const DisplaySequent& bottom() const { return steps.empty() ? top : steps.back().conclusion; }
  int length() const { return int(steps.size()); }
};

Chain composeChains(Chain a, const Chain& b);
// Reverses a chain; every step must be reversible or self-inverse (pl, pr).
Chain invertChain(const Chain& c);
CheckResult checkChain(const DisplayCalculus& calc, const Chain& c);
// Stacks the chain under a proof of its top sequent.
DisplayProof graftChain(const Chain& c, DisplayProof proofOfTop);
// The chain as a standalone fragment with a "hyp" leaf on top.
DisplayProof chainFragment(const Chain& c);

class ChainBuilder {
public:
  ChainBuilder(const DisplayCalculus& calc, DisplaySequent start);
  const DisplaySequent& current() const { return chain_.bottom(); }
  // Applies a single-premise rule in the given direction. Bindings missing
  // from `partial` are inferred by matching the source pattern against the
  // current sequent. Throws std::logic_error when the step does not apply.
  void apply(const std::string& rule, bool up, DisplaySubst partial = {});
  void append(const Chain& c);
  Chain take() { return std::move(chain_); }
  const DisplayCalculus& calc() const { return *calc_; }
  int size() const { return chain_.length(); }

private:
  const DisplayCalculus* calc_;
  Chain chain_;
};

// Displays the substructure at `at` as the entire antecedent or succedent,
// depending on its polarity, using display rules only.
struct DisplayAtResult {
  Chain chain;
  bool antecedent = true;
};
DisplayAtResult displayAt(const DisplayCalculus& calc, const DisplaySequent& d, const SeqPath& at);

// Chain from d to canonicalDisplay(d), using reversible and self-inverse
// rules only.
Chain deriveToCanonical(const DisplayCalculus& calc, const DisplaySequent& d);

// Chain between two display sequents with identical canonical forms.
Chain deriveShape(const DisplayCalculus& calc, const DisplaySequent& from, const DisplaySequent& to);

// Chain from toDisplay(s, from) to toDisplay(s, to), along the tree path.
Chain deriveRootRelabel(const DisplayCalculus& calc, const LabeledSequent& s, const Label& from,
                        const Label& to);

// Chain from toDisplay(s, w, a1, b1) to toDisplay(s, w, a2, b2).
Chain derivePartitionInvariance(const DisplayCalculus& calc, const LabeledSequent& s, const Label& w,
                                const LabeledSequent& a1, const LabeledSequent& b1,
                                const LabeledSequent& a2, const LabeledSequent& b2);

// Interconversions between the D1 and D2 readings of s in a context:
//   1: D1(s) |- X   ~>  *D2(s) |- X        2: *D1(s) |- X  ~>  D2(s) |- X
//   3: X |- D2(s)   ~>  X |- *D1(s)        4: X |- *D2(s)  ~>  X |- D1(s)
Chain deriveToggle(const DisplayCalculus& calc, const LabeledSequent& s, const Label& w, int variant,
                   const Struct& context);

// Derivable rules of the rho family, expanded into primitive rules:
//   rho1: *@*X |- Y  =>  X |- *@*Y   (reversible; dirUp derives the converse)
//   rho2: X |- @Y o @Z      =>  X |- @(Y o Z)
//   rho3: X |- *@*Y o *@*Z  =>  X |- *@*(Y o Z)
//   rho4: @X o @Y |- Z      =>  @(X o Y) |- Z
//   rho5: *@*X o *@*Y |- Z  =>  *@*(X o Y) |- Z
Chain expandRho(const DisplayCalculus& calc, int rho, const Struct& x, const Struct& y, const Struct& z,
                bool dirUp = false);

}  // namespace tpk
