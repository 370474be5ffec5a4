#include "gwtree/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace gwtree {

std::optional<LogLinearFit> fit_log_linear(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_log_linear: size mismatch");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] > 0.0) {
      x.push_back(xs[i]);
      y.push_back(std::log(ys[i]));
    }
  }
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return std::nullopt;

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;

  LogLinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A perfectly flat series is fitted exactly.
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = static_cast<int>(x.size());
  return fit;
}

}  // namespace gwtree
