#include "gwtree/properties.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace gwtree {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::False: return "false";
    case Verdict::True: return "true";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

namespace {

int parse_int(std::string_view text, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("expected an integer for ") + what + ", got '" +
                                std::string(text) + "'");
  }
  return value;
}

Verdict from_bool(bool b) { return b ? Verdict::True : Verdict::False; }

class ConstantImpl final : public PropertyAutomaton::Impl {
 public:
  explicit ConstantImpl(bool value) : value_(value) {}
  AutomatonState initial() const override { return 0; }
  AutomatonState step(AutomatonState s, const NodeEvent&) const override { return s; }
  Verdict classify(AutomatonState, TreeStatus) const override { return from_bool(value_); }
  std::optional<bool> settled(AutomatonState) const override { return value_; }
  AutomatonState state_bound() const override { return 1; }
  LevelTracking level_tracking() const override { return LevelTracking::None; }
  bool monotone() const override { return false; }

 private:
  bool value_;
};

// 0 = root not seen, 1 = X_1 == 1, 2 = X_1 != 1.
class RootOneChildImpl final : public PropertyAutomaton::Impl {
 public:
  AutomatonState initial() const override { return 0; }
  AutomatonState step(AutomatonState s, const NodeEvent& ev) const override {
    if (ev.index != 1) return s;
    return ev.children == 1 ? 1 : 2;
  }
  Verdict classify(AutomatonState s, TreeStatus) const override {
    return s == 0 ? Verdict::Undetermined : from_bool(s == 1);
  }
  std::optional<bool> settled(AutomatonState s) const override {
    if (s == 0) return std::nullopt;
    return s == 1;
  }
  AutomatonState state_bound() const override { return 3; }
  LevelTracking level_tracking() const override { return LevelTracking::None; }
  bool monotone() const override { return false; }
};

class LevelWitnessImpl final : public PropertyAutomaton::Impl {
 public:
  LevelWitnessImpl(LevelSet levels, int children) : levels_(std::move(levels)), children_(children) {}
  AutomatonState initial() const override { return 0; }
  AutomatonState step(AutomatonState s, const NodeEvent& ev) const override {
    if (s == 0 && ev.children == children_ && levels_.contains(ev.level)) return 1;
    return s;
  }
  Verdict classify(AutomatonState s, TreeStatus status) const override {
    if (s == 1) return Verdict::True;
    return status.complete ? Verdict::False : Verdict::Undetermined;
  }
  std::optional<bool> settled(AutomatonState s) const override {
    if (s == 1) return true;
    return std::nullopt;
  }
  AutomatonState state_bound() const override { return 2; }
  LevelTracking level_tracking() const override { return levels_.tracking(); }
  bool monotone() const override { return true; }

 private:
  LevelSet levels_;
  int children_;
};

enum class SizeRelation : std::uint8_t { Less, Equal, AtLeast };

class SizeImpl final : public PropertyAutomaton::Impl {
 public:
  SizeImpl(SizeRelation rel, int bound) : rel_(rel), bound_(bound) {}
  AutomatonState initial() const override { return 0; }
  AutomatonState step(AutomatonState s, const NodeEvent&) const override { return s; }
  Verdict classify(AutomatonState, TreeStatus status) const override {
    const int n = status.nodes;
    if (status.complete) {
      switch (rel_) {
        case SizeRelation::Less: return from_bool(n < bound_);
        case SizeRelation::Equal: return from_bool(n == bound_);
        case SizeRelation::AtLeast: return from_bool(n >= bound_);
      }
    }
    // An incomplete prefix of `n` explored nodes has |T| >= n + 1.
    const bool at_least_bound = n + 1 >= bound_;
    switch (rel_) {
      case SizeRelation::Less: return at_least_bound ? Verdict::False : Verdict::Undetermined;
      case SizeRelation::Equal: return n + 1 > bound_ ? Verdict::False : Verdict::Undetermined;
      case SizeRelation::AtLeast: return at_least_bound ? Verdict::True : Verdict::Undetermined;
    }
    return Verdict::Undetermined;
  }
  std::optional<bool> settled(AutomatonState) const override { return std::nullopt; }
  AutomatonState state_bound() const override { return 1; }
  LevelTracking level_tracking() const override { return LevelTracking::None; }
  bool monotone() const override { return false; }

 private:
  SizeRelation rel_;
  int bound_;
};

Verdict kleene(BoolOp op, Verdict a, Verdict b) {
  using V = Verdict;
  if (op == BoolOp::Diff) b = b == V::Undetermined ? V::Undetermined : from_bool(b == V::False);
  if (op == BoolOp::Or) {
    if (a == V::True || b == V::True) return V::True;
    if (a == V::False && b == V::False) return V::False;
    return V::Undetermined;
  }
  if (a == V::False || b == V::False) return V::False;
  if (a == V::True && b == V::True) return V::True;
  return V::Undetermined;
}

class ProductImpl final : public PropertyAutomaton::Impl {
 public:
  ProductImpl(BoolOp op, PropertyAutomaton p, PropertyAutomaton q)
      : op_(op), p_(std::move(p)), q_(std::move(q)), q_bound_(q_.state_bound()) {
    if (p_.state_bound() > std::numeric_limits<AutomatonState>::max() / q_bound_) {
      throw std::overflow_error("product automaton state space too large");
    }
  }
  AutomatonState initial() const override { return pack(p_.initial(), q_.initial()); }
  AutomatonState step(AutomatonState s, const NodeEvent& ev) const override {
    return pack(p_.step(s / q_bound_, ev), q_.step(s % q_bound_, ev));
  }
  Verdict classify(AutomatonState s, TreeStatus status) const override {
    return kleene(op_, p_.classify(s / q_bound_, status), q_.classify(s % q_bound_, status));
  }
  std::optional<bool> settled(AutomatonState s) const override {
    auto as_verdict = [](std::optional<bool> v) {
      return v ? from_bool(*v) : Verdict::Undetermined;
    };
    const Verdict v =
        kleene(op_, as_verdict(p_.settled(s / q_bound_)), as_verdict(q_.settled(s % q_bound_)));
    if (v == Verdict::Undetermined) return std::nullopt;
    return v == Verdict::True;
  }
  AutomatonState state_bound() const override { return p_.state_bound() * q_bound_; }
  LevelTracking level_tracking() const override {
    return std::max(p_.level_tracking(), q_.level_tracking());
  }
  bool monotone() const override {
    return op_ != BoolOp::Diff && p_.monotone() && q_.monotone();
  }

 private:
  AutomatonState pack(AutomatonState a, AutomatonState b) const { return a * q_bound_ + b; }

  BoolOp op_;
  PropertyAutomaton p_;
  PropertyAutomaton q_;
  AutomatonState q_bound_;
};

enum class TruncationRule : std::uint8_t { Witness, Size };

// State: 1 / 2 for a frozen True / False verdict, 3 * base_state while running.
class HorizonImpl final : public PropertyAutomaton::Impl {
 public:
  HorizonImpl(PropertyAutomaton base, int k, TruncationRule rule)
      : base_(std::move(base)), k_(k), rule_(rule) {
    if (base_.state_bound() > std::numeric_limits<AutomatonState>::max() / 3) {
      throw std::overflow_error("truncated automaton state space too large");
    }
  }
  AutomatonState initial() const override { return 3 * base_.initial(); }
  AutomatonState step(AutomatonState s, const NodeEvent& ev) const override {
    if (s % 3 != 0 || ev.index > k_) return s;
    const AutomatonState b = base_.step(s / 3, ev);
    if (const auto settled = base_.settled(b)) {
      if (!*settled) return kFalse;
      if (rule_ == TruncationRule::Witness) return kTrue;
    }
    if (ev.completes) return freeze(b, TreeStatus::Complete(ev.index));
    if (ev.index == k_) return freeze(b, TreeStatus::Incomplete(k_));
    return 3 * b;
  }
  Verdict classify(AutomatonState s, TreeStatus status) const override {
    if (s == kTrue) return Verdict::True;
    if (s == kFalse) return Verdict::False;
    // Running: the prefix stopped before node k.
    const AutomatonState b = s / 3;
    if (status.complete) return from_bool(verdict(b, status));
    if (rule_ == TruncationRule::Witness) {
      return base_.classify(b, status) == Verdict::True ? Verdict::True : Verdict::Undetermined;
    }
    return status.nodes + 1 >= k_ ? Verdict::False : Verdict::Undetermined;
  }
  std::optional<bool> settled(AutomatonState s) const override {
    if (s == kTrue) return true;
    if (s == kFalse) return false;
    return std::nullopt;
  }
  AutomatonState state_bound() const override { return 3 * base_.state_bound(); }
  LevelTracking level_tracking() const override { return base_.level_tracking(); }
  bool monotone() const override { return false; }

 private:
  static constexpr AutomatonState kTrue = 1;
  static constexpr AutomatonState kFalse = 2;

  bool verdict(AutomatonState b, TreeStatus status) const {
    const bool base_true = base_.classify(b, status) == Verdict::True;
    if (rule_ == TruncationRule::Witness) return base_true;
    return status.complete && status.nodes < k_ && base_true;
  }
  AutomatonState freeze(AutomatonState b, TreeStatus status) const {
    return verdict(b, status) ? kTrue : kFalse;
  }

  PropertyAutomaton base_;
  int k_;
  TruncationRule rule_;
};

void require_positive_k(int k) {
  if (k < 1) throw std::invalid_argument("truncation horizon k must be >= 1");
}

}  // namespace

LevelSet LevelSet::list(std::vector<int> levels, int root_level) {
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return LevelSet(Kind::List, std::move(levels), root_level);
}

LevelSet LevelSet::parse(std::string_view text, int root_level) {
  if (text == "even") return even(root_level);
  if (text == "odd") return odd(root_level);
  if (text == "prime") return primes(root_level);
  if (text.starts_with("list:")) {
    text.remove_prefix(5);
    std::vector<int> levels;
    while (true) {
      const auto comma = text.find(',');
      const int level = parse_int(text.substr(0, comma), "a level");
      if (level < 0) throw std::invalid_argument("levels must be non-negative");
      levels.push_back(level);
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    return list(std::move(levels), root_level);
  }
  throw std::invalid_argument("unknown level set '" + std::string(text) +
                              "' (expected even, odd, prime or list:<levels>)");
}

bool LevelSet::contains(int level) const {
  const int l = level + root_level_;
  switch (kind_) {
    case Kind::Even: return l % 2 == 0;
    case Kind::Odd: return l % 2 == 1;
    case Kind::Prime: return is_prime(l);
    case Kind::List: return std::binary_search(levels_.begin(), levels_.end(), l);
  }
  return false;
}

std::string LevelSet::to_string() const {
  switch (kind_) {
    case Kind::Even: return "even";
    case Kind::Odd: return "odd";
    case Kind::Prime: return "prime";
    case Kind::List: {
      std::string out = "list:";
      for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(levels_[i]);
      }
      return out;
    }
  }
  return "?";
}

PropertyAutomaton always(bool value) {
  return PropertyAutomaton(std::make_shared<ConstantImpl>(value), value ? "true" : "false");
}

PropertyAutomaton root_one_child() {
  return PropertyAutomaton(std::make_shared<RootOneChildImpl>(), "root1");
}

PropertyAutomaton level_witness(LevelSet levels, int children, std::string description) {
  if (children < 0) throw std::invalid_argument("child count must be non-negative");
  return PropertyAutomaton(std::make_shared<LevelWitnessImpl>(std::move(levels), children),
                           std::move(description));
}

PropertyAutomaton even_level_one_child(int root_level) {
  return level_witness(LevelSet::even(root_level), 1, "even1");
}

PropertyAutomaton f_level_two_children(LevelSet levels) {
  std::string name = "flevel2:" + levels.to_string();
  return level_witness(std::move(levels), 2, std::move(name));
}

PropertyAutomaton size_less_than(int k) {
  return PropertyAutomaton(std::make_shared<SizeImpl>(SizeRelation::Less, k),
                           "size-lt:" + std::to_string(k));
}

PropertyAutomaton size_equals(int n) {
  return PropertyAutomaton(std::make_shared<SizeImpl>(SizeRelation::Equal, n),
                           "size-eq:" + std::to_string(n));
}

PropertyAutomaton size_at_least(int k) {
  return PropertyAutomaton(std::make_shared<SizeImpl>(SizeRelation::AtLeast, k),
                           "size-ge:" + std::to_string(k));
}

PropertyAutomaton combine(BoolOp op, const PropertyAutomaton& p, const PropertyAutomaton& q) {
  const char* name = op == BoolOp::And ? "and" : op == BoolOp::Or ? "or" : "diff";
  return PropertyAutomaton(std::make_shared<ProductImpl>(op, p, q),
                           std::string(name) + "(" + p.description() + "," + q.description() + ")");
}

Verdict evaluate(const PropertyAutomaton& prop, const SeedPrefix& seed) {
  BfsCursor cursor;
  AutomatonState s = prop.initial();
  while (cursor.next_index() <= seed.length() && !cursor.complete()) {
    const int index = cursor.next_index();
    const int level = cursor.next_level();
    const int children = seed.count(index);
    const bool completes = cursor.feed(children);
    s = prop.step(s, NodeEvent{index, level, children, completes});
  }
  const TreeStatus status = cursor.complete() ? TreeStatus::Complete(cursor.next_index() - 1)
                                              : TreeStatus::Incomplete(seed.length());
  return prop.classify(s, status);
}

Verdict evaluate(const TautProperty& prop, const SeedPrefix& seed) {
  return evaluate(prop.automaton, seed.truncated(prop.k));
}

TautProperty truncate_by_size(const PropertyAutomaton& prop, int k) {
  require_positive_k(k);
  return {PropertyAutomaton(std::make_shared<HorizonImpl>(prop, k, TruncationRule::Size),
                            prop.description() + "&size<" + std::to_string(k)),
          k};
}

TautProperty truncate_by_witness(const PropertyAutomaton& prop, int k) {
  if (!prop.monotone()) {
    throw std::invalid_argument("witness truncation needs a monotone property; '" +
                                prop.description() + "' is not");
  }
  return determined_by(prop, k);
}

TautProperty determined_by(const PropertyAutomaton& prop, int k) {
  require_positive_k(k);
  return {PropertyAutomaton(std::make_shared<HorizonImpl>(prop, k, TruncationRule::Witness),
                            prop.description() + "@" + std::to_string(k)),
          k};
}

TautProperty combine(BoolOp op, const TautProperty& p, const TautProperty& q) {
  return {combine(op, p.automaton, q.automaton), std::max(p.k, q.k)};
}

PropertyAutomaton parse_property(std::string_view spec, int root_level) {
  if (const auto plus = spec.find('+'); plus != std::string_view::npos) {
    return combine(BoolOp::Or, parse_property(spec.substr(0, plus), root_level),
                   parse_property(spec.substr(plus + 1), root_level));
  }
  if (spec == "root1") return root_one_child();
  if (spec == "even1") return even_level_one_child(root_level);
  if (spec == "true") return always(true);
  if (spec == "false") return always(false);
  if (spec.starts_with("flevel2:")) {
    return f_level_two_children(LevelSet::parse(spec.substr(8), root_level));
  }
  auto size_arg = [&](std::string_view prefix) {
    const int v = parse_int(spec.substr(prefix.size()), "a tree size");
    if (v < 1) throw std::invalid_argument("tree size bound must be >= 1");
    return v;
  };
  if (spec.starts_with("size-lt:")) return size_less_than(size_arg("size-lt:"));
  if (spec.starts_with("size-eq:")) return size_equals(size_arg("size-eq:"));
  if (spec.starts_with("size-ge:")) return size_at_least(size_arg("size-ge:"));
  throw std::invalid_argument("unknown property '" + std::string(spec) + "'");
}

}  // namespace gwtree
