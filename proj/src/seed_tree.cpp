#include "gwtree/seed_tree.hpp"

#include <charconv>
#include <stdexcept>

namespace gwtree {

SeedPrefix::SeedPrefix(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("seed prefix must be non-empty");
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("seed counts must be non-negative");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

SeedPrefix SeedPrefix::parse(std::string_view text) {
  std::vector<int> counts;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw std::invalid_argument("malformed seed entry '" + std::string(item) + "'");
    }
    counts.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return SeedPrefix(std::move(counts));
}

SeedPrefix SeedPrefix::truncated(int k) const {
  if (k >= length()) return *this;
  return SeedPrefix(std::vector<int>(counts_.begin(), counts_.begin() + k));
}

std::string SeedPrefix::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(counts_[i]);
  }
  return out;
}

TreeView build_tree(const SeedPrefix& seed) {
  TreeView view;
  view.prefix_length_ = seed.length();
  // Parent and level are assigned when a node is generated; we keep them for
  // every generated label and trim to the known nodes at the end.
  std::vector<int> parent{0};
  std::vector<int> level{0};
  int generated = 1;
  int index = 1;
  for (; index <= seed.length() && index <= generated; ++index) {
    const int m = seed.count(index);
    for (int c = 0; c < m; ++c) {
      parent.push_back(index);
      level.push_back(level[static_cast<std::size_t>(index - 1)] + 1);
    }
    generated += m;
    if (generated == index) {
      view.status_ = TreeStatus::Complete(index);
      ++index;
      break;
    }
  }
  const int known = index - 1;
  if (!view.status_.complete) view.status_ = TreeStatus::Incomplete(known);
  view.generated_ = generated;
  parent.resize(static_cast<std::size_t>(known));
  level.resize(static_cast<std::size_t>(known));
  view.parent_ = std::move(parent);
  view.level_ = std::move(level);
  view.children_.assign(seed.counts().begin(), seed.counts().begin() + known);
  return view;
}

int TreeView::level_counts(const std::function<bool(int)>& filter) const {
  int n = 0;
  for (int l : level_) n += filter(l) ? 1 : 0;
  return n;
}

}  // namespace gwtree
