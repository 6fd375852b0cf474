#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace procdrift {

/// Augmented Dickey-Fuller test with a constant term.
struct AdfResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int lags = 0;
  int nobs = 0;
  bool degenerate = false;  ///< constant input; reported as stationary (p = 0)
};

/// Lag order chosen by AIC over 0..floor((n-1)^(1/3)) on a common sample,
/// then refit on the full sample. p-value from MacKinnon's (1994)
/// approximate response surface. Throws std::invalid_argument for n < 8.
AdfResult adf_test(std::span<const double> series);

/// MacKinnon approximate p-value for the constant-only, single-series case.
double mackinnon_p_value(double statistic);

struct AcfLag {
  int lag = 0;
  double r = 0.0;
  bool significant = false;
};

/// Sample autocorrelation for lags 0..max_lag; significant when |r| exceeds
/// the white-noise band 1.96 / sqrt(n). A zero-variance series yields r = 1 at
/// lag 0 and r = 0 (not significant) elsewhere. Throws for max_lag >= n.
std::vector<AcfLag> autocorrelation(std::span<const double> series, int max_lag);

}  // namespace procdrift
