#pragma once

#include <spdiag/types.hpp>

#include <Eigen/Core>
#include <vector>

namespace spdiag {

/// Spherical semivariogram with a measurement-error variance.
///
/// gamma(0) = 0; for 0 < h <= range the value is
/// me_var + psill * (1.5 h/range - 0.5 (h/range)^3), and me_var + psill
/// beyond the range. The measurement-error term is a discontinuity at the
/// origin that the kriging predictor treats as noise (it is not added to the
/// target covariance), so kriging with me_var > 0 smooths the data.
struct Variogram {
  double me_var = 0.0;
  double psill = 0.0;
  double range = 1.0;

  double sill() const { return me_var + psill; }
  /// me_var / (me_var + psill); 0 for a zero sill.
  double nugget_to_sill() const;

  /// Semivariance of the spatially correlated part only.
  double correlated_gamma(double h) const;
  /// Covariance of the correlated part: psill - correlated_gamma(h).
  double covariance(double h) const;
};

double spherical_gamma(const Variogram& v, double h);

struct EmpiricalVariogram {
  struct Lag {
    /// Mean distance of the pairs in the bin.
    double h = 0.0;
    Index pairs = 0;
    double gamma = 0.0;
  };
  std::vector<Lag> lags;
};

struct LagLayout {
  double max_lag = 0.0;
  int n_lags = 15;
};

/// 15 equal-width lags up to one third of the bounding-box diagonal.
LagLayout default_lag_layout(const Coordinates& coords);

/// Cressie-Hawkins robust estimator:
///   2 gamma(h) = [mean |z_i - z_j|^(1/2)]^4 / (0.457 + 0.494 / |N(h)|)
/// Pairs with distance in ((k-1) w, k w] go to lag k, w = max_lag / n_lags;
/// coincident pairs join the first lag. Empty lags are omitted.
EmpiricalVariogram empirical_variogram_robust(const Eigen::VectorXd& values,
                                              const Coordinates& coords,
                                              double max_lag, int n_lags);

struct VariogramFit {
  Variogram model;
  bool converged = false;
  int iterations = 0;
  double weighted_sse = 0.0;
};

/// Weighted least-squares fit of a spherical model with weights
/// |N(h)| / gamma(h; theta)^2 that are refreshed from the current estimate
/// on every pass, until the relative parameter change drops below 1e-6 or
/// 100 passes. Within a pass, me_var and psill are obtained by nonnegative
/// least squares for a given range and the range by a bracketed 1-d search.
VariogramFit fit_spherical_irls(const EmpiricalVariogram& emp,
                                const Variogram& init);

/// Starting values: me_var = half the first-lag gamma, psill = mean of the
/// last three lags minus me_var, range = half of max_lag.
Variogram initial_variogram(const EmpiricalVariogram& emp, double max_lag);

/// Empirical variogram with the default layout, then IRLS from the default
/// start.
VariogramFit fit_variogram(const Eigen::VectorXd& values,
                           const Coordinates& coords);
VariogramFit fit_variogram(const Eigen::VectorXd& values,
                           const Coordinates& coords, const LagLayout& layout);

}  // namespace spdiag
