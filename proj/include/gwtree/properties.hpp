#pragma once

// Tree properties as finite-state observers of the breadth-first exploration.
//
// An automaton is fed one event per known node, in label order, and at any
// point can classify the prefix seen so far as True, False or Undetermined.
// Truncations turn an automaton into a k-tautologically determined event,
// i.e. one whose verdict is a function of the first k seed entries only.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gwtree/seed_tree.hpp"

namespace gwtree {

enum class Verdict : std::uint8_t { False, True, Undetermined };

const char* to_string(Verdict v);

/// How much of a node's level an automaton looks at. The exact engine keeps
/// only this much level information in its state.
enum class LevelTracking : std::uint8_t { None = 0, Parity = 1, Exact = 2 };

struct NodeEvent {
  int index = 1;     // BFS label, 1-based
  int level = 0;     // exact level, or level parity under LevelTracking::Parity
  int children = 0;  // X_index
  bool completes = false;  // the tree has exactly `index` nodes
};

using AutomatonState = std::uint64_t;

/// Immutable, cheaply copyable handle to a finite-state tree observer.
class PropertyAutomaton {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual AutomatonState initial() const = 0;
    virtual AutomatonState step(AutomatonState s, const NodeEvent& ev) const = 0;
    virtual Verdict classify(AutomatonState s, TreeStatus status) const = 0;
    /// A verdict that no further node can change, if there is one.
    virtual std::optional<bool> settled(AutomatonState s) const = 0;
    /// Every reachable state is strictly below this bound.
    virtual AutomatonState state_bound() const = 0;
    virtual LevelTracking level_tracking() const = 0;
    /// True verdicts never arise from completion alone and False only from
    /// completion: the property is witnessed by a finite set of nodes.
    virtual bool monotone() const = 0;
  };

  PropertyAutomaton(std::shared_ptr<const Impl> impl, std::string description)
      : impl_(std::move(impl)), description_(std::move(description)) {}

  AutomatonState initial() const { return impl_->initial(); }
  AutomatonState step(AutomatonState s, const NodeEvent& ev) const { return impl_->step(s, ev); }
  Verdict classify(AutomatonState s, TreeStatus status) const { return impl_->classify(s, status); }
  std::optional<bool> settled(AutomatonState s) const { return impl_->settled(s); }
  AutomatonState state_bound() const { return impl_->state_bound(); }
  LevelTracking level_tracking() const { return impl_->level_tracking(); }
  bool monotone() const { return impl_->monotone(); }
  const std::string& description() const { return description_; }

 private:
  std::shared_ptr<const Impl> impl_;
  std::string description_;
};

/// A set F of levels. `root_level` shifts every level (0 makes the root even).
class LevelSet {
 public:
  enum class Kind : std::uint8_t { Even, Odd, Prime, List };

  static LevelSet even(int root_level = 0) { return LevelSet(Kind::Even, {}, root_level); }
  static LevelSet odd(int root_level = 0) { return LevelSet(Kind::Odd, {}, root_level); }
  static LevelSet primes(int root_level = 0) { return LevelSet(Kind::Prime, {}, root_level); }
  static LevelSet list(std::vector<int> levels, int root_level = 0);
  /// even | odd | prime | list:3,5,7
  static LevelSet parse(std::string_view text, int root_level = 0);

  bool contains(int level) const;
  LevelTracking tracking() const {
    return kind_ == Kind::Even || kind_ == Kind::Odd ? LevelTracking::Parity : LevelTracking::Exact;
  }
  std::string to_string() const;

 private:
  LevelSet(Kind kind, std::vector<int> levels, int root_level)
      : kind_(kind), levels_(std::move(levels)), root_level_(root_level) {}

  Kind kind_;
  std::vector<int> levels_;  // sorted
  int root_level_;
};

bool is_prime(int n);

// Built-in properties.
PropertyAutomaton always(bool value);
/// {X_1 = 1}
PropertyAutomaton root_one_child();
/// Some node on an F-level has exactly `children` children.
PropertyAutomaton level_witness(LevelSet levels, int children, std::string description);
/// Some node on an even level has exactly one child.
PropertyAutomaton even_level_one_child(int root_level = 0);
/// Some node on an F-level has exactly two children.
PropertyAutomaton f_level_two_children(LevelSet levels);
PropertyAutomaton size_less_than(int k);
PropertyAutomaton size_equals(int n);
PropertyAutomaton size_at_least(int k);

enum class BoolOp : std::uint8_t { And, Or, Diff };

/// Product automaton; Diff is `p and not q`.
PropertyAutomaton combine(BoolOp op, const PropertyAutomaton& p, const PropertyAutomaton& q);

Verdict evaluate(const PropertyAutomaton& prop, const SeedPrefix& seed);

/// A k-tautologically determined event: its automaton freezes its verdict at
/// node k (or at completion, if earlier) and ignores everything after.
struct TautProperty {
  PropertyAutomaton automaton;
  int k;

  const std::string& description() const { return automaton.description(); }
};

/// Uses only the first k entries of `seed`.
Verdict evaluate(const TautProperty& prop, const SeedPrefix& seed);

/// A ∩ {|T| < k}.
TautProperty truncate_by_size(const PropertyAutomaton& prop, int k);
/// "prop is already True on the first k nodes". Throws std::invalid_argument
/// for non-monotone automata.
TautProperty truncate_by_witness(const PropertyAutomaton& prop, int k);
/// Same event as truncate_by_witness without the monotonicity requirement.
/// Exact for properties the first k nodes always decide, such as {X_1 = 1}
/// with k >= 1 or {|T| = n} with k >= n.
TautProperty determined_by(const PropertyAutomaton& prop, int k);

TautProperty combine(BoolOp op, const TautProperty& p, const TautProperty& q);

/// Parses a property spec: root1, even1, flevel2:<levels>, size-lt:<k>,
/// size-eq:<n>, size-ge:<k>, true, false, and unions joined by '+'.
/// Throws std::invalid_argument on malformed input.
PropertyAutomaton parse_property(std::string_view spec, int root_level = 0);

}  // namespace gwtree
