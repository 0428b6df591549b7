#include "tpk/semantics.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace tpk {

bool RelationalModel::hasWorld(const std::string& w) const {
  return std::find(worlds.begin(), worlds.end(), w) != worlds.end();
}

bool satisfies(const RelationalModel& m, const std::string& w, const Formula& f) {
  if (!m.hasWorld(w)) throw std::invalid_argument("unknown world " + w);
  switch (f.kind()) {
    case Conn::Atom: {
      auto it = m.val.find(f.atomName());
      return it != m.val.end() && it->second.count(w) > 0;
    }
    case Conn::Top: return true;
    case Conn::Bot: return false;
    case Conn::Not: return !satisfies(m, w, f.child());
    case Conn::And: return satisfies(m, w, f.left()) && satisfies(m, w, f.right());
    case Conn::Or: return satisfies(m, w, f.left()) || satisfies(m, w, f.right());
    case Conn::Imp: return !satisfies(m, w, f.left()) || satisfies(m, w, f.right());
    case Conn::BoxF:
      for (auto& u : m.worlds)
        if (m.rel.count({w, u}) && !satisfies(m, u, f.child())) return false;
      return true;
    case Conn::DiaF:
      for (auto& u : m.worlds)
        if (m.rel.count({w, u}) && satisfies(m, u, f.child())) return true;
      return false;
    case Conn::BoxP:
      for (auto& u : m.worlds)
        if (m.rel.count({u, w}) && !satisfies(m, u, f.child())) return false;
      return true;
    case Conn::DiaP:
      for (auto& u : m.worlds)
        if (m.rel.count({u, w}) && satisfies(m, u, f.child())) return true;
      return false;
  }
  throw std::logic_error("satisfies");
}

bool globallyTrue(const RelationalModel& m, const Formula& f) {
  for (auto& w : m.worlds)
    if (!satisfies(m, w, f)) return false;
  return true;
}

void closeFrame(RelationalModel& m, FrameCondition c) {
  switch (c) {
    case FrameCondition::None: return;
    case FrameCondition::Reflexive:
      for (auto& w : m.worlds) m.rel.insert({w, w});
      return;
    case FrameCondition::Transitive: {
      bool changed = true;
      while (changed) {
        changed = false;
        for (auto& a : m.worlds)
          for (auto& b : m.worlds)
            for (auto& c2 : m.worlds)
              if (m.rel.count({a, b}) && m.rel.count({b, c2}) && m.rel.insert({a, c2}).second) changed = true;
      }
      return;
    }
    case FrameCondition::Euclidean: {
      // Rab & Rac -> Rbc
      bool changed = true;
      while (changed) {
        changed = false;
        for (auto& a : m.worlds)
          for (auto& b : m.worlds)
            for (auto& c2 : m.worlds)
              if (m.rel.count({a, b}) && m.rel.count({a, c2}) && m.rel.insert({b, c2}).second) changed = true;
      }
      return;
    }
  }
}

bool frameSatisfies(const RelationalModel& m, FrameCondition c) {
  switch (c) {
    case FrameCondition::None: return true;
    case FrameCondition::Reflexive:
      for (auto& w : m.worlds)
        if (!m.rel.count({w, w})) return false;
      return true;
    case FrameCondition::Transitive:
      for (auto& a : m.worlds)
        for (auto& b : m.worlds)
          for (auto& c2 : m.worlds)
            if (m.rel.count({a, b}) && m.rel.count({b, c2}) && !m.rel.count({a, c2})) return false;
      return true;
    case FrameCondition::Euclidean:
      for (auto& a : m.worlds)
        for (auto& b : m.worlds)
          for (auto& c2 : m.worlds)
            if (m.rel.count({a, b}) && m.rel.count({a, c2}) && !m.rel.count({b, c2})) return false;
      return true;
  }
  return true;
}

RelationalModel randomModel(std::mt19937_64& rng, int nWorlds, const std::vector<std::string>& atoms,
                            FrameCondition c) {
  RelationalModel m;
  for (int i = 0; i < nWorlds; ++i) m.worlds.push_back("w" + std::to_string(i));
  std::uniform_int_distribution<int> coin(0, 2);
  for (auto& a : m.worlds)
    for (auto& b : m.worlds)
      if (coin(rng) == 0) m.rel.insert({a, b});
  for (auto& p : atoms)
    for (auto& w : m.worlds)
      if (coin(rng) != 0) m.val[p].insert(w);
  closeFrame(m, c);
  return m;
}

RelationalModel modelFromJson(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RelationalModel m;
  auto toStr = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (auto& w : j.at("worlds")) m.worlds.push_back(toStr(w));
  if (j.contains("rel"))
    for (auto& e : j["rel"]) m.rel.insert({toStr(e.at(0)), toStr(e.at(1))});
  if (j.contains("val"))
    for (auto& [atom, ws] : j["val"].items())
      for (auto& w : ws) m.val[atom].insert(toStr(w));
  for (auto& [a, b] : m.rel)
    if (!m.hasWorld(a) || !m.hasWorld(b)) throw std::invalid_argument("rel mentions unknown world");
  for (auto& [atom, ws] : m.val)
    for (auto& w : ws)
      if (!m.hasWorld(w)) throw std::invalid_argument("val mentions unknown world");
  return m;
}

std::string modelToJson(const RelationalModel& m) {
  nlohmann::json j;
  j["worlds"] = m.worlds;
  auto rel = nlohmann::json::array();
  for (auto& [a, b] : m.rel) rel.push_back({a, b});
  j["rel"] = rel;
  auto val = nlohmann::json::object();
  for (auto& [atom, ws] : m.val) val[atom] = std::vector<std::string>(ws.begin(), ws.end());
  j["val"] = val;
  return j.dump(2);
}

}  // namespace tpk
