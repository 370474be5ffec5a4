#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwtree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Bad command line or property spec; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A computed result failed its own accuracy or bound check; exit status 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // exact mc sweep decay series disc survival lambertw evenlevel
  std::string property = "root1";
  std::string lambda = "1";     // value, or min:max:steps
  std::string k = "1";          // value, or min:max:step
  std::string truncation = "witness";  // witness | size
  std::string method;           // sweep: exact | mc;  decay: mc | complex
  std::int64_t samples = 100000;
  int cap = 0;                  // 0: default_cap(lambda)
  int nmax = 0;                 // 0: chosen from --tol
  double epsilon = 0.1;
  int points = 64;
  int horizon = 0;              // 0: 5 * max(k)
  std::uint64_t seed = 1;
  std::string x = "0";          // lambertw argument(s)
  std::string at;               // series: evaluate at "re,im" instead of listing coefficients
  double tol = 1e-10;
  int root_level = 0;
  std::string format = "csv";   // csv | text (survival, lambertw)
  int threads = 0;              // not part of the result, never recorded
  std::string out;              // not recorded
};

/// Parses argv (without the program name). Throws UsageError.
RunConfig parse_args(const std::vector<std::string>& args);

/// The canonical argument list that reproduces `cfg`'s output; written into
/// the CSV header.
std::vector<std::string> canonical_args(const RunConfig& cfg);

/// Runs one study, writing CSV (or text) to `out`. Returns the exit status;
/// diagnostics go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, write to --out or stdout.
int main(int argc, char** argv);

/// Exposed for tests.
std::vector<double> parse_lambda_range(const std::string& text);
std::vector<int> parse_k_range(const std::string& text);

}  // namespace gwtree::cli
