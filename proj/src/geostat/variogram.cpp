#include <spdiag/errors.hpp>
#include <spdiag/variogram.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace spdiag {

double Variogram::nugget_to_sill() const {
  const double s = sill();
  return s > 0 ? me_var / s : 0.0;
}

namespace {

// Spherical shape: 1.5 u - 0.5 u^3 for u < 1, else 1.
double shape(double h, double range) {
  if (h <= 0) return 0.0;
  if (h >= range) return 1.0;
  const double u = h / range;
  return 1.5 * u - 0.5 * u * u * u;
}

}  // namespace

double Variogram::correlated_gamma(double h) const {
  return psill * shape(h, range);
}

double Variogram::covariance(double h) const {
  return psill - correlated_gamma(h);
}

double spherical_gamma(const Variogram& v, double h) {
  if (h <= 0) return 0.0;
  return v.me_var + v.correlated_gamma(h);
}

LagLayout default_lag_layout(const Coordinates& coords) {
  const Eigen::RowVector2d lo = coords.colwise().minCoeff();
  const Eigen::RowVector2d hi = coords.colwise().maxCoeff();
  return {(hi - lo).norm() / 3.0, 15};
}

EmpiricalVariogram empirical_variogram_robust(const Eigen::VectorXd& values,
                                              const Coordinates& coords,
                                              double max_lag, int n_lags) {
  const Index n = values.size();
  if (coords.rows() != n) {
    throw EstimationError("values and coordinates differ in length");
  }
  if (n < 2) throw EstimationError("variogram needs at least 2 observations");
  if (!(max_lag > 0) || n_lags < 1) {
    throw ParameterError("variogram needs max_lag > 0 and n_lags >= 1");
  }
  const double width = max_lag / n_lags;
  std::vector<double> sum_root(static_cast<std::size_t>(n_lags), 0.0);
  std::vector<double> sum_h(static_cast<std::size_t>(n_lags), 0.0);
  std::vector<Index> count(static_cast<std::size_t>(n_lags), 0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double h = std::hypot(coords(i, 0) - coords(j, 0),
                                  coords(i, 1) - coords(j, 1));
      if (h > max_lag) continue;
      int k = h <= 0 ? 0 : static_cast<int>(std::ceil(h / width)) - 1;
      k = std::clamp(k, 0, n_lags - 1);
      sum_root[k] += std::sqrt(std::abs(values[i] - values[j]));
      sum_h[k] += h;
      ++count[k];
    }
  }
  EmpiricalVariogram out;
  for (int k = 0; k < n_lags; ++k) {
    if (count[k] == 0) continue;
    const double m = static_cast<double>(count[k]);
    const double mean_root = sum_root[k] / m;
    const double two_gamma =
        std::pow(mean_root, 4) / (0.457 + 0.494 / m);
    out.lags.push_back({sum_h[k] / m, count[k], 0.5 * two_gamma});
  }
  if (out.lags.empty()) {
    throw EstimationError("no observation pairs within the maximum lag");
  }
  return out;
}

Variogram initial_variogram(const EmpiricalVariogram& emp, double max_lag) {
  const auto& lags = emp.lags;
  if (lags.empty()) throw EstimationError("empty empirical variogram");
  Variogram v;
  v.me_var = 0.5 * lags.front().gamma;
  const std::size_t tail = std::min<std::size_t>(3, lags.size());
  double level = 0.0;
  for (std::size_t k = lags.size() - tail; k < lags.size(); ++k) {
    level += lags[k].gamma;
  }
  level /= static_cast<double>(tail);
  v.psill = std::max(0.0, level - v.me_var);
  v.range = max_lag > 0 ? 0.5 * max_lag : 1.0;
  return v;
}

namespace {

struct LinearFit {
  double me_var = 0.0;
  double psill = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// Weighted nonnegative least squares for gamma_j ~ me_var + psill * s_j.
LinearFit solve_sill(const EmpiricalVariogram& emp,
                     const std::vector<double>& w, double range) {
  double sw = 0, ss = 0, sss = 0, sg = 0, ssg = 0;
  std::vector<double> s(emp.lags.size());
  for (std::size_t j = 0; j < emp.lags.size(); ++j) {
    s[j] = shape(emp.lags[j].h, range);
    const double g = emp.lags[j].gamma;
    sw += w[j];
    ss += w[j] * s[j];
    sss += w[j] * s[j] * s[j];
    sg += w[j] * g;
    ssg += w[j] * s[j] * g;
  }
  auto sse = [&](double a, double b) {
    double e = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double r = emp.lags[j].gamma - a - b * s[j];
      e += w[j] * r * r;
    }
    return e;
  };
  LinearFit best;
  auto consider = [&](double a, double b) {
    if (a < 0 || b < 0) return;
    const double e = sse(a, b);
    if (e < best.sse * (1 - 1e-12)) best = {a, b, e};
  };
  consider(sw > 0 ? sg / sw : 0.0, 0.0);
  if (sss > 0) consider(0.0, ssg / sss);
  const double det = sw * sss - ss * ss;
  if (det > 1e-12 * sw * sss) {
    consider((sss * sg - ss * ssg) / det, (sw * ssg - ss * sg) / det);
  }
  if (!std::isfinite(best.sse)) best = {0.0, 0.0, sse(0.0, 0.0)};
  return best;
}

struct RangeFit {
  Variogram model;
  double sse = 0.0;
};

// Minimizes the weighted SSE over the range, with me_var and psill profiled
// out: log-spaced scan followed by golden-section refinement.
RangeFit fit_fixed_weights(const EmpiricalVariogram& emp,
                           const std::vector<double>& w) {
  double h_min = std::numeric_limits<double>::infinity(), h_max = 0;
  for (const auto& l : emp.lags) {
    if (l.h > 0) h_min = std::min(h_min, l.h);
    h_max = std::max(h_max, l.h);
  }
  if (!std::isfinite(h_min)) h_min = h_max = 1.0;
  const double lo = 0.25 * h_min, hi = 10.0 * h_max;
  constexpr int kGrid = 120;
  auto at = [&](double log_a) {
    const double a = std::exp(log_a);
    return std::pair{a, solve_sill(emp, w, a)};
  };
  const double llo = std::log(lo), lhi = std::log(hi);
  const double step = (lhi - llo) / (kGrid - 1);
  int best_k = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kGrid; ++k) {
    const double e = at(llo + step * k).second.sse;
    if (e < best_sse) {
      best_sse = e;
      best_k = k;
    }
  }
  double a = llo + step * std::max(0, best_k - 1);
  double b = llo + step * std::min(kGrid - 1, best_k + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = at(c).second.sse, fd = at(d).second.sse;
  for (int it = 0; it < 100 && (b - a) > 1e-12; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = at(c).second.sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = at(d).second.sse;
    }
  }
  double log_best = fc <= fd ? c : d;
  auto [range, lin] = at(log_best);
  auto [grid_range, grid_lin] = at(llo + step * best_k);
  if (grid_lin.sse < lin.sse) {
    range = grid_range;
    lin = grid_lin;
  }
  return {{lin.me_var, lin.psill, range}, lin.sse};
}

// Scale-free weighted criterion sum N_j (g_j / gamma_j - 1)^2.
double cressie_criterion(const EmpiricalVariogram& emp, const Variogram& v,
                         double floor) {
  double e = 0;
  for (const auto& l : emp.lags) {
    const double g = std::max(spherical_gamma(v, l.h), floor);
    const double r = l.gamma / g - 1.0;
    e += static_cast<double>(l.pairs) * r * r;
  }
  return e;
}

}  // namespace

VariogramFit fit_spherical_irls(const EmpiricalVariogram& emp,
                                const Variogram& init) {
  if (emp.lags.size() < 3) {
    throw EstimationError("variogram fit needs at least 3 lags with pairs");
  }
  double g_max = 0, h_max = 0;
  for (const auto& l : emp.lags) {
    g_max = std::max(g_max, l.gamma);
    h_max = std::max(h_max, l.h);
  }
  VariogramFit out;
  if (g_max <= 0) {
    out.model = {0.0, 0.0, init.range > 0 ? init.range : 1.0};
    out.converged = true;
    return out;
  }
  const double floor = 1e-12 * g_max;
  Variogram theta = init;
  theta.me_var = std::max(0.0, theta.me_var);
  theta.psill = std::max(0.0, theta.psill);
  if (!(theta.range > 0)) theta.range = 0.5 * h_max;

  Variogram best = theta;
  double best_crit = cressie_criterion(emp, theta, floor);
  std::vector<double> w(emp.lags.size());
  for (int it = 1; it <= 100; ++it) {
    for (std::size_t j = 0; j < emp.lags.size(); ++j) {
      const double g = std::max(spherical_gamma(theta, emp.lags[j].h), floor);
      w[j] = static_cast<double>(emp.lags[j].pairs) / (g * g);
    }
    const RangeFit step = fit_fixed_weights(emp, w);
    const Variogram next = step.model;
    const double crit = cressie_criterion(emp, next, floor);
    if (crit < best_crit) {
      best_crit = crit;
      best = next;
    }
    auto rel = [](double a, double b, double scale) {
      return std::abs(a - b) / std::max(std::abs(b), scale);
    };
    const double change =
        std::max({rel(next.me_var, theta.me_var, 1e-9 * g_max),
                  rel(next.psill, theta.psill, 1e-9 * g_max),
                  rel(next.range, theta.range, 1e-9 * h_max)});
    theta = next;
    out.iterations = it;
    if (change < 1e-6) {
      out.converged = true;
      break;
    }
  }
  out.model = out.converged ? theta : best;
  out.weighted_sse = cressie_criterion(emp, out.model, floor);
  return out;
}

VariogramFit fit_variogram(const Eigen::VectorXd& values,
                           const Coordinates& coords) {
  return fit_variogram(values, coords, default_lag_layout(coords));
}

VariogramFit fit_variogram(const Eigen::VectorXd& values,
                           const Coordinates& coords,
                           const LagLayout& layout) {
  const auto emp =
      empirical_variogram_robust(values, coords, layout.max_lag, layout.n_lags);
  return fit_spherical_irls(emp, initial_variogram(emp, layout.max_lag));
}

}  // namespace spdiag
