#pragma once

// Brute-force reference implementations used by the tests. Nothing here goes
// through the library's cursor, automata or DP.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gwtree/properties.hpp"

namespace oracle {

struct Tree {
  std::vector<int> level;     // per processed node
  std::vector<int> children;  // per processed node
  int processed = 0;
  int generated = 1;
  bool complete = false;
};

// Breadth-first growth with an explicit queue of node levels.
inline Tree explore(const std::vector<int>& counts, int limit) {
  Tree t;
  std::vector<int> queue{0};
  std::size_t head = 0;
  while (head < queue.size() && static_cast<int>(head) < limit && head < counts.size()) {
    const int lvl = queue[head];
    const int x = counts[head];
    t.level.push_back(lvl);
    t.children.push_back(x);
    for (int c = 0; c < x; ++c) queue.push_back(lvl + 1);
    ++head;
  }
  t.processed = static_cast<int>(head);
  t.generated = static_cast<int>(queue.size());
  t.complete = head == queue.size();
  return t;
}

enum class Kind { Root1, Even1, FLevel2, SizeLt, SizeEq, SizeGe };

struct Prop {
  Kind kind;
  int param = 0;
  std::string levels;  // FLevel2 level spec
  std::function<bool(int)> in_levels;

  std::string spec() const {
    switch (kind) {
      case Kind::Root1: return "root1";
      case Kind::Even1: return "even1";
      case Kind::FLevel2: return "flevel2:" + levels;
      case Kind::SizeLt: return "size-lt:" + std::to_string(param);
      case Kind::SizeEq: return "size-eq:" + std::to_string(param);
      case Kind::SizeGe: return "size-ge:" + std::to_string(param);
    }
    return {};
  }
  bool is_witness_kind() const { return kind == Kind::Even1 || kind == Kind::FLevel2; }
};

inline bool prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d < n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<Prop> all_props() {
  return {
      {Kind::Root1, 0, "", {}},
      {Kind::Even1, 0, "", {}},
      {Kind::FLevel2, 0, "prime", [](int l) { return prime(l); }},
      {Kind::FLevel2, 0, "even", [](int l) { return l % 2 == 0; }},
      {Kind::FLevel2, 0, "odd", [](int l) { return l % 2 == 1; }},
      {Kind::FLevel2, 0, "list:1,3", [](int l) { return l == 1 || l == 3; }},
      {Kind::SizeLt, 2, "", {}},
      {Kind::SizeLt, 4, "", {}},
      {Kind::SizeEq, 1, "", {}},
      {Kind::SizeEq, 3, "", {}},
      {Kind::SizeEq, 4, "", {}},
      {Kind::SizeGe, 2, "", {}},
      {Kind::SizeGe, 5, "", {}},
  };
}

inline bool witness_at(const Prop& p, int level, int children) {
  if (p.kind == Kind::Even1) return level % 2 == 0 && children == 1;
  return p.in_levels(level) && children == 2;
}

// Three-valued verdict of the property on everything the prefix reveals.
inline gwtree::Verdict raw(const Prop& p, const std::vector<int>& counts) {
  using gwtree::Verdict;
  const Tree t = explore(counts, static_cast<int>(counts.size()));
  const int n = t.processed;
  switch (p.kind) {
    case Kind::Root1:
      return counts.empty() ? Verdict::Undetermined : (counts[0] == 1 ? Verdict::True : Verdict::False);
    case Kind::Even1:
    case Kind::FLevel2:
      for (int i = 0; i < n; ++i) {
        if (witness_at(p, t.level[i], t.children[i])) return Verdict::True;
      }
      return t.complete ? Verdict::False : Verdict::Undetermined;
    case Kind::SizeLt:
      if (t.complete) return n < p.param ? Verdict::True : Verdict::False;
      return n + 1 >= p.param ? Verdict::False : Verdict::Undetermined;
    case Kind::SizeEq:
      if (t.complete) return n == p.param ? Verdict::True : Verdict::False;
      return n + 1 > p.param ? Verdict::False : Verdict::Undetermined;
    case Kind::SizeGe:
      if (t.complete) return n >= p.param ? Verdict::True : Verdict::False;
      return n + 1 >= p.param ? Verdict::True : Verdict::Undetermined;
  }
  return Verdict::Undetermined;
}

// Membership of a length-k seed in the witness truncation ("already True on
// the first k nodes") and in the size truncation (A and |T| < k).
inline bool witness_member(const Prop& p, const std::vector<int>& seed, int k) {
  const std::vector<int> head(seed.begin(), seed.begin() + k);
  return raw(p, head) == gwtree::Verdict::True;
}

inline bool size_member(const Prop& p, const std::vector<int>& seed, int k) {
  const std::vector<int> head(seed.begin(), seed.begin() + k);
  const Tree t = explore(head, k);
  return t.complete && t.processed < k && raw(p, head) == gwtree::Verdict::True;
}

// Calls f on every vector in {0..max_count}^k.
inline void for_each_seed(int k, int max_count, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> s(static_cast<std::size_t>(k), 0);
  while (true) {
    f(s);
    int i = 0;
    while (i < k && s[static_cast<std::size_t>(i)] == max_count) s[static_cast<std::size_t>(i++)] = 0;
    if (i == k) return;
    ++s[static_cast<std::size_t>(i)];
  }
}

inline std::vector<double> pmf_table(double lambda, int max_count) {
  std::vector<double> p(static_cast<std::size_t>(max_count) + 1);
  p[0] = std::exp(-lambda);
  for (int m = 1; m <= max_count; ++m) p[static_cast<std::size_t>(m)] = p[static_cast<std::size_t>(m) - 1] * lambda / m;
  return p;
}

struct BoxSum {
  double inside = 0.0;   // P(member and all k counts <= max_count)
  double outside = 0.0;  // P(some count > max_count)
};

inline BoxSum box_probability(int k, int max_count, double lambda,
                              const std::function<bool(const std::vector<int>&)>& member) {
  const auto pmf = pmf_table(lambda, max_count);
  BoxSum b;
  double head = 0.0;
  for (double q : pmf) head += q;
  for_each_seed(k, max_count, [&](const std::vector<int>& s) {
    if (!member(s)) return;
    double w = 1.0;
    for (int x : s) w *= pmf[static_cast<std::size_t>(x)];
    b.inside += w;
  });
  b.outside = 1.0 - std::pow(head, k);
  return b;
}

}  // namespace oracle
