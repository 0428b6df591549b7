#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tpk/formula.hpp"

namespace tpk {

// Finite Kripke model. Used as a test oracle only.
struct RelationalModel {
  std::vector<std::string> worlds;
  std::set<std::pair<std::string, std::string>> rel;
  std::map<std::string, std::set<std::string>> val;  // atom -> worlds where true

  bool hasWorld(const std::string& w) const;
};

// Truth at a world per the eleven semantic clauses. <P>A holds at w iff some u
// with (u,w) in R satisfies A. Throws std::invalid_argument for unknown worlds.
bool satisfies(const RelationalModel& m, const std::string& w, const Formula& f);
bool globallyTrue(const RelationalModel& m, const Formula& f);

// Frame conditions for the three registered axioms.
enum class FrameCondition { None, Reflexive, Transitive, Euclidean };

// Closes the relation under the condition (loops / transitive closure /
// Rab & Rac -> Rbc to a fixpoint).
void closeFrame(RelationalModel& m, FrameCondition c);
bool frameSatisfies(const RelationalModel& m, FrameCondition c);

// Uniformly random model over `nWorlds` worlds and the given atoms, then
// closed under the frame condition.
RelationalModel randomModel(std::mt19937_64& rng, int nWorlds, const std::vector<std::string>& atoms,
                            FrameCondition c = FrameCondition::None);

// JSON I/O: {"worlds": [...], "rel": [[w,u],...], "val": {"p": [w,...]}}.
RelationalModel modelFromJson(const std::string& text);
std::string modelToJson(const RelationalModel& m);

}  // namespace tpk
