#pragma once

// Monte Carlo estimation on sampled seeds.
//
// Samples are split into fixed-size blocks. Block b draws from its own
// generator, seeded from (master seed, b), and per-block counts are reduced
// in block order, so results do not depend on the number of worker threads.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gwtree/fit.hpp"
#include "gwtree/properties.hpp"
#include "gwtree/seed_tree.hpp"

namespace gwtree {

/// Random stream for one block of samples.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Poisson variates: sequential inversion below lambda = 10, Hormann's
/// transformed rejection (PTRS) above.
class PoissonSampler {
 public:
  explicit PoissonSampler(double lambda);
  int operator()(Rng& rng) const;
  double lambda() const { return lambda_; }

 private:
  int inversion(Rng& rng) const;
  int ptrs(Rng& rng) const;

  double lambda_;
  double exp_neg_lambda_ = 0.0;
  double log_lambda_ = 0.0;
  double b_ = 0.0, a_ = 0.0, inv_alpha_ = 0.0, v_r_ = 0.0;
};

SeedPrefix sample_seed(double lambda, int k, Rng& rng);

struct MCEstimate {
  double p_hat = 0.0;
  std::int64_t successes = 0;
  std::int64_t n_samples = 0;
  double ci_low = 0.0;  // 95% Wilson interval
  double ci_high = 0.0;
  std::uint64_t rng_seed = 0;
};

MCEstimate wilson_estimate(std::int64_t successes, std::int64_t n_samples, std::uint64_t rng_seed);

struct MCOptions {
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  /// 0 means std::thread::hardware_concurrency().
  int workers = 0;
};

MCEstimate estimate_prob(const TautProperty& prop, double lambda, const MCOptions& opts);

enum class Truncation : std::uint8_t { Witness, Size };

struct DecayFit {
  std::vector<int> ks;
  /// Estimated P(A_k xor A_horizon) for each k.
  std::vector<MCEstimate> estimates;
  int horizon = 0;
  /// Fraction of samples the horizon itself leaves undecided; bounds the
  /// bias from using A_horizon in place of A.
  MCEstimate undecided_at_horizon;
  std::optional<LogLinearFit> fit;
  double c_hat = 0.0;  // -slope
  double C_hat = 0.0;  // exp(intercept)

  /// "ok", or "decay below MC resolution" when fewer than two estimates are positive.
  std::string status() const { return fit ? "ok" : "decay below MC resolution"; }
};

/// Estimates P(A_k xor A_horizon) for each k in `ks` (strictly increasing,
/// all < horizon), where A_k is the witness or size truncation of `prop`.
/// Witness truncation requires a monotone property.
DecayFit sym_diff_decay(const PropertyAutomaton& prop, double lambda, const std::vector<int>& ks,
                        int horizon, const MCOptions& opts,
                        Truncation truncation = Truncation::Witness);

/// P(|T| >= k and at most floor(k / (2 lambda + 1)) of the first k nodes lie on even levels).
MCEstimate even_level_tail(double lambda, int k, const MCOptions& opts);

/// P(|T| >= k).
MCEstimate size_tail(double lambda, int k, const MCOptions& opts);

/// Block size of the deterministic work split.
inline constexpr std::int64_t kSamplesPerBlock = 1 << 13;

}  // namespace gwtree
