// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Tolerances are pinned here; a criterion that the implementation cannot
// meet is reported as FAIL rather than relaxed.

#include "support.hpp"

#include <spdiag/comparators.hpp>
#include <spdiag/errors.hpp>
#include <spdiag/importance.hpp>
#include <spdiag/kriging.hpp>
#include <spdiag/parallel.hpp>
#include <spdiag/spatial_loo.hpp>
#include <spdiag/synth.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

using namespace spdiag;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, Verdict& v) {
  if (!v.ok) ++failures;
  std::cout << (v.ok ? "PASS" : "FAIL") << "  criterion " << id << ": "
            << title << " |" << v.detail.str() << std::endl;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool within(double v, double target, double tol) {
  return std::abs(v - target) <= tol;
}

// Shared Meuse profile settings.
DiagnosticsConfig meuse_diagnostics(int n_reps) {
  DiagnosticsConfig cfg;
  cfg.r_min = 0.0;
  cfg.r_max = 1500.0;
  cfg.n_bins = 25;
  cfg.n_reps = n_reps;
  cfg.seed = 2024;
  cfg.n_perm = 5;
  return cfg;
}

ModelSpec spec_of(ModelKind k, int trees = 500) {
  ModelSpec s;
  s.kind = k;
  s.forest.n_trees = trees;
  return s;
}

// ---------------------------------------------------------------------------

void criterion1(const Dataset& ds, const std::vector<Location>& grid) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto nn = nn_distance_stats(ds);
  const auto pd = prediction_distance_distribution(ds, grid);
  const double dt = seconds_since(t0);
  v.detail << " NN mean " << fmt(nn.mean) << " min " << fmt(nn.min)
           << " median " << fmt(nn.median) << "; grid mean " << fmt(pd.mean)
           << " q1 " << fmt(pd.q1) << " q3 " << fmt(pd.q3) << "; "
           << fmt(dt, 2) << " s";
  v.require(within(nn.mean, 112, 1), "NN mean 112 +-1");
  v.require(std::lround(nn.min) == 44, "NN min 44");
  v.require(within(nn.median, 107, 1), "NN median 107 +-1");
  v.require(within(pd.mean, 96, 2), "grid mean 96 +-2");
  v.require(within(pd.q1, 53, 2), "grid q1 53 +-2");
  v.require(within(pd.q3, 120, 2), "grid q3 120 +-2");
  v.require(dt < 1.0, "runtime < 1 s");
  report(1, "dataset statistics", v);
}

void criterion2(const Dataset& ds) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto m = fit(spec_of(ModelKind::mlr), ds, 1);
  const double r2 = dynamic_cast<const LinearModel&>(*m).r_squared();
  const double dt = seconds_since(t0);
  v.detail << " R2 " << fmt(100 * r2) << "%; " << fmt(dt, 2) << " s";
  v.require(within(100 * r2, 72.6, 0.2), "R2 72.6 +-0.2 pp");
  v.require(dt < 1.0, "runtime < 1 s");
  report(2, "MLR training R2", v);
}

void criterion3(const Dataset& ds) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto raw = fit_variogram(ds.response(), ds.coords());
  const Index n = ds.size();
  Eigen::MatrixXd x(n, ds.num_features() + 1);
  x.col(0).setOnes();
  x.rightCols(ds.num_features()) = ds.features();
  const Eigen::VectorXd resid =
      ds.response() - x * x.colPivHouseholderQr().solve(ds.response());
  const auto res = fit_variogram(resid, ds.coords());
  const double dt = seconds_since(t0);
  v.detail << " logZn range " << fmt(raw.model.range) << " ratio "
           << fmt(raw.model.nugget_to_sill(), 3) << "; residual range "
           << fmt(res.model.range) << " ratio "
           << fmt(res.model.nugget_to_sill(), 3) << "; " << fmt(dt, 2) << " s";
  v.require(within(raw.model.range, 897, 89.7), "logZn range 897 +-10%");
  v.require(within(raw.model.nugget_to_sill(), 0.27, 0.05),
            "logZn nugget/sill 0.27 +-0.05");
  v.require(within(res.model.range, 926, 92.6), "residual range 926 +-10%");
  v.require(within(res.model.nugget_to_sill(), 0.27, 0.05),
            "residual nugget/sill 0.27 +-0.05");
  v.require(dt < 5.0, "runtime < 5 s");
  report(3, "variogram fits", v);
}

void criterion4(const Dataset& ds) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto cfg = meuse_diagnostics(5000);
  const auto prof = spep(run_spatial_loo(ds, spec_of(ModelKind::ok), cfg), cfg);
  const double range = fit_variogram(ds.response(), ds.coords()).model.range;
  const auto& first = prof.points.front();
  v.detail << " first bin d " << fmt(first.d_hat) << " RMSE "
           << fmt(first.value, 3) << "; beyond " << fmt(range) << " m:";
  v.require(first.value >= 0.08 && first.value <= 0.18,
            "first bin RMSE in [0.08, 0.18]");
  int beyond = 0;
  for (const auto& p : prof.points) {
    if (p.d_hat <= range) continue;
    ++beyond;
    v.detail << " " << fmt(p.d_hat) << "->" << fmt(p.value, 3);
    v.require(p.value >= 0.28 && p.value <= 0.42,
              "bin at " + fmt(p.d_hat) + " m in [0.28, 0.42]");
  }
  v.require(beyond > 0, "at least one bin beyond the range");
  v.detail << "; " << fmt(seconds_since(t0), 3) << " s";
  report(4, "OK error profile endpoints (N = 5000)", v);
}

void criterion5(const Dataset& meuse, const Dataset& fields) {
  Verdict v;
  const auto t0 = Clock::now();
  const int n_records = 1000;
  auto ok_rf = spec_of(ModelKind::ok_rf, 100);
  auto rf = spec_of(ModelKind::rf, 100);
  auto ok = spec_of(ModelKind::ok);

  Index far = 0, far_bad = 0, at_zero_bad = 0, done = 0;
  for (std::uint64_t it = 0; done < n_records; ++it) {
    std::mt19937_64 rng(mix_seed(77, it));
    const Index i = std::uniform_int_distribution<Index>(0, meuse.size() - 1)(rng);
    const double r = std::uniform_real_distribution<double>(0.0, 1500.0)(rng);
    BufferSplit split;
    try {
      split = buffer_exclude(meuse, i, r);
    } catch (const ExhaustedBufferError&) {
      continue;
    }
    const auto train = meuse.subset(split.train);
    const std::uint64_t seed = rng();
    std::unique_ptr<FittedModel> h, f, k;
    try {
      h = fit(ok_rf, train, seed);
      f = fit(rf, train, seed);
      k = fit(ok, train, seed);
    } catch (const FitError&) {
      continue;
    }
    ++done;
    const auto row = meuse.feature_row(i);
    if (split.d_actual >= 500.0) {
      ++far;
      if (h->predict(meuse.location(i), row) != f->predict(meuse.location(i), row)) {
        ++far_bad;
      }
    }
    // a training location is at distance 0
    const Index j = split.train[static_cast<std::size_t>(it) % split.train.size()];
    const auto row_j = meuse.feature_row(j);
    if (h->predict(meuse.location(j), row_j) != k->predict(meuse.location(j), row_j)) {
      ++at_zero_bad;
    }
  }

  ModelSpec nn_lda = spec_of(ModelKind::nn_lda);
  ModelSpec lda = spec_of(ModelKind::lda);
  Index beyond = 0, beyond_bad = 0, tried = 0;
  for (std::uint64_t it = 0; tried < n_records; ++it) {
    std::mt19937_64 rng(mix_seed(78, it));
    const Index i = std::uniform_int_distribution<Index>(0, fields.size() - 1)(rng);
    const double r = std::uniform_real_distribution<double>(0.0, 1000.0)(rng);
    BufferSplit split;
    try {
      split = buffer_exclude(fields, i, r);
    } catch (const ExhaustedBufferError&) {
      continue;
    }
    const auto train = fields.subset(split.train);
    std::unique_ptr<FittedModel> h, l;
    try {
      h = fit(nn_lda, train, 1);
      l = fit(lda, train, 1);
    } catch (const FitError&) {
      continue;
    }
    ++tried;
    if (split.d_actual > 100.0) {
      ++beyond;
      const auto row = fields.feature_row(i);
      if (h->predict(fields.location(i), row) != l->predict(fields.location(i), row)) {
        ++beyond_bad;
      }
    }
  }
  v.detail << " OK-RF: " << far << "/" << done << " records at d >= 500, "
           << far_bad << " differ from RF, " << at_zero_bad
           << " differ from OK at d = 0; NN-LDA: " << beyond << "/" << tried
           << " records at d > 100, " << beyond_bad << " differ from LDA; "
           << fmt(seconds_since(t0), 3) << " s";
  v.require(far > 0 && far_bad == 0, "OK-RF == RF for d >= 500");
  v.require(at_zero_bad == 0, "OK-RF == OK at d = 0");
  v.require(beyond > 0 && beyond_bad == 0, "NN-LDA == LDA for d > 100");
  report(5, "hybrid identities", v);
}

void criterion6(const Dataset& ds) {
  Verdict v;
  const auto t0 = Clock::now();
  std::map<std::string, double> mean;
  for (auto kind : {CvKind::loo, CvKind::random_kfold, CvKind::kmeans_spatial}) {
    CvScheme s;
    s.kind = kind;
    s.k = 10;
    s.repetitions = 50;
    s.seed = 2024;
    const auto d = cv_prediction_distances(ds, make_folds(ds, s));
    mean[to_string(kind)] = summarize_distances(d).mean;
  }
  const double dt = seconds_since(t0);
  v.detail << " LOO " << fmt(mean["loo"]) << ", random 10-fold "
           << fmt(mean["random_kfold"]) << ", 10-means "
           << fmt(mean["kmeans_spatial"]) << "; " << fmt(dt, 3) << " s";
  v.require(within(mean["loo"], 112, 2), "LOO 112 +-2");
  v.require(within(mean["random_kfold"], 116, 5), "random 116 +-5");
  v.require(within(mean["kmeans_spatial"], 298, 0.15 * 298), "k-means 298 +-15%");
  v.require(dt < 60.0, "runtime < 1 min");
  report(6, "CV distance report", v);
}

void criterion7(const Dataset& ds) {
  Verdict v;
  double below140 = -1, below100 = -1;
  for (double r = 0.0; r <= 3000.0; r += 1.0) {
    const double m = mean_training_size(ds, r);
    if (below140 < 0 && m < 140) below140 = r;
    if (below100 < 0 && m < 100) below100 = r;
  }
  v.detail << " < 140 from r = " << fmt(below140) << " m, < 100 from r = "
           << fmt(below100) << " m";
  v.require(within(below140, 415, 30), "415 +-30 m");
  v.require(within(below100, 1000, 75), "1000 +-75 m");
  report(7, "training-size decay", v);
}

struct ProfileRuns {
  Svip rf;
  Profile rf_clean;
};

ProfileRuns criteria8(const Dataset& ds) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto cfg = meuse_diagnostics(2000);
  const std::vector<PermutationChannel> channels{
      PermutationChannel::for_feature(ds, "sqrt.dist"),
      PermutationChannel::for_feature(ds, "elev")};
  std::map<std::string, Svip> out;
  for (auto k : {ModelKind::ok, ModelKind::nn, ModelKind::rf, ModelKind::ok_rf}) {
    out[to_string(k)] = svip(run_spatial_loo(ds, spec_of(k), cfg, channels), cfg);
  }
  for (const char* m : {"OK", "NN"}) {
    double worst = 0.0;
    for (const auto& [name, prof] : out[m].channels) {
      for (const auto& p : prof.points) {
        worst = std::max(worst, std::abs(p.importance));
        v.require(std::abs(p.importance) <= 2 * p.standard_error,
                  std::string(m) + " " + name + " at " + fmt(p.d_hat));
      }
    }
    v.detail << " " << m << " max |imp| " << fmt(worst) << ";";
  }
  const auto& hyb = out["OK_RF"];
  const auto& rf = out["RF"];
  for (const auto& [name, prof] : hyb.channels) {
    const auto& ref = rf.channels.at(name);
    Index compared = 0;
    for (std::size_t b = 0; b < prof.points.size(); ++b) {
      const auto& p = prof.points[b];
      if (p.d_hat < 500.0) continue;
      const auto match = std::find_if(ref.points.begin(), ref.points.end(),
                                      [&](const auto& q) { return q.bin == p.bin; });
      if (match == ref.points.end()) continue;
      ++compared;
      const double se = std::hypot(p.standard_error, match->standard_error);
      v.require(std::abs(p.importance - match->importance) <= 2 * se,
                "OK-RF vs RF " + name + " at " + fmt(p.d_hat));
    }
    v.require(compared > 0, "bins beyond 500 m for " + name);
    const auto& h0 = prof.points.front();
    const auto& r0 = ref.points.front();
    v.detail << " " << name << " first bin OK-RF " << fmt(h0.importance, 3)
             << " vs RF " << fmt(r0.importance, 3) << ", " << compared
             << " bins >= 500 m compared;";
    v.require(h0.importance <= 0.25 * std::abs(r0.importance) + 2 * h0.standard_error,
              "OK-RF " + name + " near 0 at the first bin");
  }
  v.detail << " " << fmt(seconds_since(t0), 3) << " s";
  report(8, "SVIP zero lines and OK-RF ramp (N = 2000)", v);
  return {rf, rf.clean};
}

void criterion9(const Dataset& ds, const Profile& rf) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto cfg = meuse_diagnostics(2000);
  const auto ked = spep(run_spatial_loo(ds, spec_of(ModelKind::ked), cfg), cfg);
  std::map<int, double> ked_by_bin;
  for (const auto& p : ked.points) ked_by_bin[p.bin] = p.value;
  Index near = 0, far = 0;
  for (const auto& p : rf.points) {
    if (!ked_by_bin.count(p.bin)) continue;
    const double k = ked_by_bin[p.bin];
    if (p.d_hat < 100.0) {
      ++near;
      v.detail << " d " << fmt(p.d_hat) << ": RF/KED " << fmt(p.value / k, 3);
      v.require(k < p.value, "KED < RF at " + fmt(p.d_hat));
      v.require(p.value / k > 1.5, "RF/KED > 1.5 at " + fmt(p.d_hat));
    } else if (p.d_hat > 500.0) {
      ++far;
      v.detail << " d " << fmt(p.d_hat) << ": " << fmt(p.value / k, 3);
      v.require(k < p.value, "KED < RF at " + fmt(p.d_hat));
    }
  }
  v.require(near > 0 && far > 0, "bins below 100 m and above 500 m");
  v.detail << "; " << fmt(seconds_since(t0), 3) << " s";
  report(9, "KED vs RF ordering", v);
}

void criterion10(const Dataset& fields) {
  Verdict v;
  const auto t0 = Clock::now();
  DiagnosticsConfig cfg;
  cfg.r_min = 0.0;
  cfg.r_max = 2000.0;
  cfg.n_reps = 3000;
  cfg.n_bins = 20;
  cfg.seed = 5;
  cfg.measure = ErrorMeasure::misclassification;

  const auto hyb = run_spatial_loo(fields, spec_of(ModelKind::nn_lda), cfg);
  Index inside = 0, wrong = 0;
  for (const auto& rec : hyb.records) {
    if (rec.d > 100.0) continue;
    const auto split = buffer_exclude(fields, rec.target, rec.r);
    const int g = fields.groups()[rec.target];
    const bool in_field = std::any_of(split.train.begin(), split.train.end(),
                                      [&](Index j) { return fields.groups()[j] == g; });
    if (!in_field) continue;
    ++inside;
    if (rec.y_hat != rec.y) ++wrong;
  }
  v.detail << " NN-LDA " << wrong << "/" << inside << " wrong within fields;";
  v.require(inside > 0 && wrong == 0, "NN-LDA error 0 within training fields");

  const auto lda = spep(run_spatial_loo(fields, spec_of(ModelKind::lda), cfg), cfg);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < lda.points.size(); ++k) {
    if (lda.points[k].d_hat <= 500.0) continue;
    xs.push_back(lda.points[k].d_hat);
    ys.push_back(lda.smoothed[k]);
  }
  double change = 0.0;
  if (xs.size() >= 2) {
    Eigen::MatrixXd a(xs.size(), 2);
    Eigen::VectorXd b(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) a.row(k) << 1.0, xs[k], b[k] = ys[k];
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    change = coef[1] * (xs.back() - xs.front());
  }
  v.detail << " LDA trend beyond 500 m " << fmt(change, 3) << " over "
           << xs.size() << " bins;";
  v.require(xs.size() >= 2 && std::abs(change) <= 0.1,
            "LDA profile change beyond 500 m <= 0.1");

  const std::vector<GroupDefinition> defs{
      {"Late", {"late1", "late2", "late3", "late4", "late5", "late6"}}};
  const auto g = fit_pc_groups(fields, defs)[0];
  double worst = 0.0;
  for (Index i = 0; i < fields.size(); ++i) {
    const auto row = fields.feature_row(i);
    const Eigen::VectorXd back = g.back_transform(g.scores(row));
    for (std::size_t j = 0; j < g.members.size(); ++j) {
      worst = std::max(worst, std::abs(back[j] - row[g.members[j]]));
    }
  }
  v.detail << " PC round trip " << fmt(worst, 2) << ";";
  v.require(worst <= 1e-10, "PC round trip <= 1e-10");

  // field-level CV distances against brute force
  CvScheme s;
  s.kind = CvKind::field_level;
  s.k = 10;
  s.repetitions = 3;
  const auto folds = make_folds(fields, s);
  const auto d = cv_prediction_distances(fields, folds);
  std::size_t at = 0, bad = 0;
  for (const auto& rep : folds) {
    for (const auto& test : rep) {
      std::vector<char> held(fields.size(), 0);
      for (Index i : test) held[i] = 1;
      for (Index i : test) {
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < fields.size(); ++j) {
          if (!held[j]) {
            best = std::min(best, std::hypot(fields.coords()(i, 0) - fields.coords()(j, 0),
                                             fields.coords()(i, 1) - fields.coords()(j, 1)));
          }
        }
        if (at >= d.size() || d[at++] != best) ++bad;
      }
    }
  }
  v.detail << " field-level distances " << bad << " mismatches of " << d.size()
           << "; " << fmt(seconds_since(t0), 3) << " s";
  v.require(bad == 0 && at == d.size(), "field-level distances exact");
  report(10, "classification properties", v);
}

void criterion11(const Dataset& ds, const std::vector<Location>& grid) {
  Verdict v;
  // kriging against a dense Lagrange system
  Coordinates c(5, 2);
  c << 0, 0, 120, 30, 40, 210, 300, 260, 180, 90;
  Eigen::VectorXd z(5);
  z << 1.2, 0.7, 1.9, 1.1, 0.4;
  const Variogram vg{0.02, 0.3, 400.0};
  const auto sys = KrigingSystem::ordinary(c, z, vg);
  double krige_err = 0.0;
  for (const Location t : {Location{60, 80}, Location{250, 150}, Location{500, 500}}) {
    std::vector<std::vector<double>> a(6, std::vector<double>(6, 0.0));
    std::vector<double> rhs(6, 1.0);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double h = std::hypot(c(i, 0) - c(j, 0), c(i, 1) - c(j, 1));
        a[i][j] = vg.covariance(h) + (i == j ? vg.me_var : 0.0);
      }
      a[i][5] = a[5][i] = 1.0;
      rhs[i] = vg.covariance(std::hypot(c(i, 0) - t.x, c(i, 1) - t.y));
    }
    const auto w = test::gauss_solve(a, rhs);
    double want = 0.0;
    for (int i = 0; i < 5; ++i) want += w[i] * z[i];
    krige_err = std::max(krige_err, std::abs(sys.predict(t).value - want));
  }
  v.detail << " kriging " << fmt(krige_err, 2) << ";";
  v.require(krige_err <= 1e-8, "kriging vs hand solver <= 1e-8");

  // LOO-MLR against the hat matrix
  CvScheme loo;
  loo.kind = CvKind::loo;
  const auto cv = run_cv(ds, spec_of(ModelKind::mlr), loo, ErrorMeasure::rmse);
  const Index n = ds.size();
  Eigen::MatrixXd x(n, ds.num_features() + 1);
  x.col(0).setOnes();
  x.rightCols(ds.num_features()) = ds.features();
  const Eigen::MatrixXd h = x * (x.transpose() * x).inverse() * x.transpose();
  const Eigen::VectorXd e = ds.response() - h * ds.response();
  double sse = 0.0;
  for (Index i = 0; i < n; ++i) sse += std::pow(e[i] / (1.0 - h(i, i)), 2);
  const double hat_err = std::abs(cv.estimate - std::sqrt(sse / n));
  v.detail << " LOO-MLR " << fmt(hat_err, 2) << ";";
  v.require(hat_err <= 1e-8, "LOO-MLR vs hat matrix <= 1e-8");

  // distance summaries against brute force
  const auto nn = nearest_neighbour_distances(ds);
  const auto pd = prediction_distances(ds, grid);
  std::size_t bad = 0;
  for (Index i = 0; i < n; ++i) {
    if (nn[i] != test::brute_nearest(ds.coords(), ds.coords()(i, 0), ds.coords()(i, 1), i)) ++bad;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (pd[k] != test::brute_nearest(ds.coords(), grid[k].x, grid[k].y)) ++bad;
  }
  std::vector<double> sorted = pd;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double d : sorted) sum += d;
  const auto s = summarize_distances(pd);
  const auto q = [&](double p) {
    const double pos = p * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - lo;
    return lo + 1 < sorted.size() ? sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
                                  : sorted[lo];
  };
  if (s.min != sorted.front() || s.max != sorted.back()) ++bad;
  if (s.q1 != q(0.25) || s.median != q(0.5) || s.q3 != q(0.75)) ++bad;
  if (std::abs(s.mean - sum / sorted.size()) > 1e-12 * s.mean) ++bad;
  Index total = 0;
  for (Index cnt : s.histogram.counts) total += cnt;
  if (total != static_cast<Index>(pd.size())) ++bad;
  v.detail << " distance mismatches " << bad;
  v.require(bad == 0, "distance summaries exact");
  report(11, "oracle equivalences", v);
}

}  // namespace

int main() {
  const auto meuse = test::meuse();
  const auto grid = test::meuse_grid();
  FieldSynthConfig fc;
  const auto fields = synth_fields(fc);

  criterion1(meuse, grid);
  criterion2(meuse);
  criterion3(meuse);
  criterion4(meuse);
  criterion5(meuse, fields);
  criterion6(meuse);
  criterion7(meuse);
  const auto runs = criteria8(meuse);
  criterion9(meuse, runs.rf_clean);
  criterion10(fields);
  criterion11(meuse, grid);

  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
