#include "gwtree/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gwtree {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("lambda must be finite and positive");
  }
}

// Runs `per_block(rng, count, accumulator)` over every block and returns the
// per-block accumulators in block order.
template <class Acc, class PerBlock>
std::vector<Acc> run_blocks(const MCOptions& opts, const Acc& init, PerBlock per_block) {
  if (opts.samples < 1) throw std::invalid_argument("need at least one sample");
  const std::int64_t blocks = (opts.samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  std::vector<Acc> results(static_cast<std::size_t>(blocks), init);
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < blocks; b = next++) {
      Rng rng(opts.seed, static_cast<std::uint64_t>(b));
      const std::int64_t count = std::min(kSamplesPerBlock, opts.samples - b * kSamplesPerBlock);
      per_block(rng, count, results[static_cast<std::size_t>(b)]);
    }
  };
  int workers = opts.workers > 0 ? opts.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = static_cast<int>(std::clamp<std::int64_t>(workers, 1, blocks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

PoissonSampler::PoissonSampler(double lambda) : lambda_(lambda) {
  require_lambda(lambda);
  exp_neg_lambda_ = std::exp(-lambda);
  log_lambda_ = std::log(lambda);
  if (lambda >= 10.0) {
    const double slam = std::sqrt(lambda);
    b_ = 0.931 + 2.53 * slam;
    a_ = -0.059 + 0.02483 * b_;
    inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
    v_r_ = 0.9277 - 3.6224 / (b_ - 2.0);
  }
}

int PoissonSampler::operator()(Rng& rng) const {
  return lambda_ < 10.0 ? inversion(rng) : ptrs(rng);
}

int PoissonSampler::inversion(Rng& rng) const {
  const double u = rng.uniform();
  double p = exp_neg_lambda_;
  double cdf = p;
  int x = 0;
  // The cdf can stall just below 1 in floating point; stop once terms vanish.
  while (u > cdf && p > 0.0) {
    ++x;
    p *= lambda_ / x;
    cdf += p;
  }
  return x;
}

int PoissonSampler::ptrs(Rng& rng) const {
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a_ / us + b_) * u + lambda_ + 0.43);
    if (us >= 0.07 && v <= v_r_) return static_cast<int>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_) <=
        -lambda_ + k * log_lambda_ - std::lgamma(k + 1.0)) {
      return static_cast<int>(k);
    }
  }
}

SeedPrefix sample_seed(double lambda, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("sample_seed: k must be >= 1");
  const PoissonSampler draw(lambda);
  std::vector<int> counts(static_cast<std::size_t>(k));
  for (auto& c : counts) c = draw(rng);
  return SeedPrefix(std::move(counts));
}

MCEstimate wilson_estimate(std::int64_t successes, std::int64_t n_samples, std::uint64_t rng_seed) {
  constexpr double z = 1.959963984540054;
  MCEstimate e;
  e.successes = successes;
  e.n_samples = n_samples;
  e.rng_seed = rng_seed;
  const auto n = static_cast<double>(n_samples);
  e.p_hat = static_cast<double>(successes) / n;
  const double z2n = z * z / n;
  const double centre = (e.p_hat + z2n / 2.0) / (1.0 + z2n);
  const double half = z / (1.0 + z2n) * std::sqrt(e.p_hat * (1.0 - e.p_hat) / n + z2n / (4.0 * n));
  e.ci_low = successes == 0 ? 0.0 : std::clamp(centre - half, 0.0, e.p_hat);
  e.ci_high = successes == n_samples ? 1.0 : std::clamp(centre + half, e.p_hat, 1.0);
  return e;
}

MCEstimate estimate_prob(const TautProperty& prop, double lambda, const MCOptions& opts) {
  const PoissonSampler draw(lambda);
  const auto& aut = prop.automaton;
  const auto counts = run_blocks<std::int64_t>(opts, 0, [&](Rng& rng, std::int64_t n, std::int64_t& hits) {
    for (std::int64_t s = 0; s < n; ++s) {
      // Equivalent to evaluate(prop, sample_seed(lambda, k, rng)), but draws
      // only the child counts the exploration reaches.
      BfsCursor cursor;
      AutomatonState state = aut.initial();
      while (cursor.next_index() <= prop.k && !cursor.complete() && !aut.settled(state)) {
        const int index = cursor.next_index();
        const int level = cursor.next_level();
        const int children = draw(rng);
        const bool completes = cursor.feed(children);
        state = aut.step(state, NodeEvent{index, level, children, completes});
      }
      const TreeStatus status = cursor.complete() ? TreeStatus::Complete(cursor.next_index() - 1)
                                                  : TreeStatus::Incomplete(cursor.next_index() - 1);
      if (aut.classify(state, status) == Verdict::True) ++hits;
    }
  });
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return wilson_estimate(total, opts.samples, opts.seed);
}

namespace {

struct DecayCounts {
  std::vector<std::int64_t> mismatches;
  std::int64_t undecided = 0;
};

constexpr int kNever = 1 << 30;

}  // namespace

DecayFit sym_diff_decay(const PropertyAutomaton& prop, double lambda, const std::vector<int>& ks,
                        int horizon, const MCOptions& opts, Truncation truncation) {
  if (ks.empty()) throw std::invalid_argument("sym_diff_decay: ks must be non-empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1])) {
      throw std::invalid_argument("sym_diff_decay: ks must be positive and strictly increasing");
    }
  }
  if (horizon < ks.back()) throw std::invalid_argument("sym_diff_decay: horizon must be >= max(ks)");
  if (truncation == Truncation::Witness && !prop.monotone()) {
    throw std::invalid_argument("witness truncation needs a monotone property");
  }
  const PoissonSampler draw(lambda);

  DecayCounts init;
  init.mismatches.assign(ks.size(), 0);
  const auto blocks = run_blocks<DecayCounts>(opts, init, [&](Rng& rng, std::int64_t n, DecayCounts& acc) {
    for (std::int64_t s = 0; s < n; ++s) {
      BfsCursor cursor;
      AutomatonState state = prop.initial();
      int first_true = kNever;  // first prefix length on which prop is True
      while (cursor.next_index() <= horizon && !cursor.complete()) {
        const int index = cursor.next_index();
        const int level = cursor.next_level();
        const int children = draw(rng);
        const bool completes = cursor.feed(children);
        state = prop.step(state, NodeEvent{index, level, children, completes});
        const TreeStatus status =
            completes ? TreeStatus::Complete(index) : TreeStatus::Incomplete(index);
        if (prop.classify(state, status) == Verdict::True) {
          first_true = index;
          break;
        }
      }
      // For the size rule we need the completion index, so finish the walk.
      if (truncation == Truncation::Size && first_true != kNever) {
        while (cursor.next_index() <= horizon && !cursor.complete()) {
          const int index = cursor.next_index();
          const int level = cursor.next_level();
          const int children = draw(rng);
          const bool completes = cursor.feed(children);
          state = prop.step(state, NodeEvent{index, level, children, completes});
        }
      }
      const int size = cursor.complete() ? cursor.next_index() - 1 : kNever;
      auto verdict_at = [&](int k) {
        if (truncation == Truncation::Witness) return first_true <= k;
        return first_true != kNever && size < k;
      };
      const bool truth = verdict_at(horizon);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (verdict_at(ks[i]) != truth) ++acc.mismatches[i];
      }
      const bool undecided = truncation == Truncation::Witness ? size == kNever && first_true == kNever
                                                               : size == kNever;
      if (undecided) ++acc.undecided;
    }
  });

  DecayCounts total = init;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < ks.size(); ++i) total.mismatches[i] += b.mismatches[i];
    total.undecided += b.undecided;
  }

  DecayFit out;
  out.ks = ks;
  out.horizon = horizon;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out.estimates.push_back(wilson_estimate(total.mismatches[i], opts.samples, opts.seed));
    xs.push_back(ks[i]);
    ys.push_back(out.estimates.back().p_hat);
  }
  out.undecided_at_horizon = wilson_estimate(total.undecided, opts.samples, opts.seed);
  out.fit = fit_log_linear(xs, ys);
  if (out.fit) {
    out.c_hat = -out.fit->slope;
    out.C_hat = std::exp(out.fit->intercept);
  }
  return out;
}

MCEstimate even_level_tail(double lambda, int k, const MCOptions& opts) {
  if (k < 1) throw std::invalid_argument("even_level_tail: k must be >= 1");
  const PoissonSampler draw(lambda);
  const int threshold = static_cast<int>(std::floor(k / (2.0 * lambda + 1.0)));
  const auto counts = run_blocks<std::int64_t>(opts, 0, [&](Rng& rng, std::int64_t n, std::int64_t& hits) {
    for (std::int64_t s = 0; s < n; ++s) {
      BfsCursor cursor;
      int even = 0;
      bool reached = true;
      // Levels of nodes 1..k depend only on X_1..X_{k-1}.
      for (int i = 1; i <= k; ++i) {
        if (cursor.complete()) {
          reached = false;
          break;
        }
        if (cursor.next_level() % 2 == 0) ++even;
        if (even > threshold) break;
        if (i < k) cursor.feed(draw(rng));
      }
      if (reached && even <= threshold) ++hits;
    }
  });
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return wilson_estimate(total, opts.samples, opts.seed);
}

MCEstimate size_tail(double lambda, int k, const MCOptions& opts) {
  if (k < 1) throw std::invalid_argument("size_tail: k must be >= 1");
  const PoissonSampler draw(lambda);
  const auto counts = run_blocks<std::int64_t>(opts, 0, [&](Rng& rng, std::int64_t n, std::int64_t& hits) {
    for (std::int64_t s = 0; s < n; ++s) {
      BfsCursor cursor;
      while (cursor.next_index() < k && !cursor.complete()) cursor.feed(draw(rng));
      if (!cursor.complete()) ++hits;
    }
  });
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return wilson_estimate(total, opts.samples, opts.seed);
}

}  // namespace gwtree
