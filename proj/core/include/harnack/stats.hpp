#pragma once

#include <span>

namespace harnack {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;  ///< 1 when the data are exactly linear (or constant in y)
};

/// Ordinary least squares y ~ slope * x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace harnack
