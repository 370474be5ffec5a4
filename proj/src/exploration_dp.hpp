#pragma once

// Forward dynamic program over the breadth-first exploration of a seed prefix.
//
// A Policy supplies the weight algebra:
//   Value                           weight carried by one frontier state
//   Value unit(), zero()
//   int  child_limit(const Value&)  largest child count to enumerate
//   void on_expand(const Value&)    called once per state before its children
//   void add_child(Value& dst, const Value& src, int m)
//   void settle(Verdict, const Value& src, int m, int free_coords)
//   void settle_all(Verdict, int free_coords)   the initial state is settled

#include <algorithm>
#include <compare>
#include <map>

#include "gwtree/properties.hpp"

namespace gwtree::detail {

struct DpKey {
  int generated;  // clamped to k + 1
  int level_end;  // label of the last node on the current level, clamped to k + 1
  int level;      // exact, parity, or 0, per the automaton's LevelTracking
  AutomatonState state;

  auto operator<=>(const DpKey&) const = default;
};

template <class Policy>
void explore(const TautProperty& prop, Policy& policy) {
  const PropertyAutomaton& aut = prop.automaton;
  const int k = prop.k;
  const LevelTracking tracking = aut.level_tracking();

  const AutomatonState s0 = aut.initial();
  if (const auto v = aut.settled(s0)) {
    policy.settle_all(*v ? Verdict::True : Verdict::False, k);
    return;
  }

  using Value = typename Policy::Value;
  std::map<DpKey, Value> frontier;
  std::map<DpKey, Value> next;
  frontier.emplace(DpKey{1, tracking == LevelTracking::None ? 0 : 1, 0, s0}, policy.unit());

  for (int i = 1; i <= k && !frontier.empty(); ++i) {
    next.clear();
    const int free_after = k - i;
    for (const auto& [key, value] : frontier) {
      policy.on_expand(value);
      const int limit = policy.child_limit(value);
      for (int m = 0; m <= limit; ++m) {
        const int g = key.generated + m;
        const bool completes = g == i;
        const AutomatonState s = aut.step(key.state, NodeEvent{i, key.level, m, completes});
        if (completes) {
          policy.settle(aut.classify(s, TreeStatus::Complete(i)), value, m, free_after);
          continue;
        }
        if (const auto v = aut.settled(s)) {
          policy.settle(*v ? Verdict::True : Verdict::False, value, m, free_after);
          continue;
        }
        if (i == k) {
          policy.settle(aut.classify(s, TreeStatus::Incomplete(k)), value, m, 0);
          continue;
        }
        DpKey child{std::min(g, k + 1), key.level_end, key.level, s};
        if (tracking != LevelTracking::None && i == key.level_end) {
          child.level = tracking == LevelTracking::Parity ? (key.level + 1) & 1 : key.level + 1;
          child.level_end = child.generated;
        }
        auto [it, inserted] = next.try_emplace(child, policy.zero());
        policy.add_child(it->second, value, m);
      }
    }
    std::swap(frontier, next);
  }
}

}  // namespace gwtree::detail
