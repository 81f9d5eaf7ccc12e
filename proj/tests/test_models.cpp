#include "support.hpp"

#include <spdiag/errors.hpp>
#include <spdiag/lda.hpp>
#include <spdiag/models.hpp>
#include <spdiag/random_forest.hpp>
#include <spdiag/synth.hpp>

#include <doctest.h>

#include <Eigen/Dense>

using namespace spdiag;
using doctest::Approx;

namespace {

ModelSpec spec_of(ModelKind k, std::vector<std::string> features = {}) {
  ModelSpec s;
  s.kind = k;
  s.features = std::move(features);
  return s;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("model kind names round-trip") {
  for (auto k : {ModelKind::nn, ModelKind::ok, ModelKind::ked, ModelKind::mlr,
                 ModelKind::gwr, ModelKind::rf, ModelKind::ok_rf,
                 ModelKind::lda, ModelKind::nn_lda}) {
    CHECK(parse_model_kind(to_string(k)) == k);
  }
  CHECK(parse_model_kind("ok-rf") == ModelKind::ok_rf);
  CHECK(parse_model_kind("nn-lda") == ModelKind::nn_lda);
  CHECK_THROWS_AS(parse_model_kind("svm"), ConfigError);
}

TEST_CASE("nearest neighbour returns the nearest training response") {
  const auto ds = test::linear_fixture(10, 4);
  const std::vector<Index> train{0, 2, 3, 5, 7, 9};
  const auto sub = ds.subset(train);
  const auto m = fit(spec_of(ModelKind::nn), sub, 1);
  for (Index i : {1, 4, 6, 8}) {
    double best = INFINITY;
    double want = 0.0;
    for (Index j : train) {
      const double d = std::hypot(ds.coords()(j, 0) - ds.coords()(i, 0),
                                  ds.coords()(j, 1) - ds.coords()(i, 1));
      if (d < best) best = d, want = ds.response()[j];
    }
    CHECK(m->predict(ds.location(i), ds.feature_row(i)) == want);
    CHECK(m->nearest_training_distance(ds.location(i)) == best);
  }
}

TEST_CASE("coordinate overrides move the target") {
  const auto ds = test::linear_fixture(20, 5);
  const auto m = fit(spec_of(ModelKind::nn), ds, 1);
  const auto row = ds.feature_row(3);
  const NamedOverride ox{"x", ds.coords()(7, 0)};
  const NamedOverride oy{"y", ds.coords()(7, 1)};
  const std::vector<NamedOverride> both{ox, oy};
  CHECK(m->predict_with_features(ds.location(3), row, both) ==
        ds.response()[7]);
  const std::vector<NamedOverride> unrelated{{"noise", 123.0}};
  CHECK(m->predict_with_features(ds.location(3), row, unrelated) ==
        ds.response()[3]);
}

TEST_CASE("MLR on meuse explains 72.6 percent") {
  const auto ds = test::meuse();
  const auto m = fit(spec_of(ModelKind::mlr), ds, 1);
  const auto* lm = dynamic_cast<const LinearModel*>(m.get());
  REQUIRE(lm);
  CHECK(lm->used_features().size() == 4);
  CHECK(lm->r_squared() == Approx(0.726).epsilon(0.003));
}

TEST_CASE("MLR leave-one-out equals the hat-matrix formula") {
  const auto ds = test::linear_fixture(12, 9, 0.5);
  const auto m = fit(spec_of(ModelKind::mlr), ds, 1);
  Eigen::MatrixXd x(12, 4);
  x.col(0).setOnes();
  x.rightCols(3) = ds.features();
  const Eigen::MatrixXd h = x * (x.transpose() * x).inverse() * x.transpose();
  const Eigen::VectorXd resid = ds.response() - h * ds.response();
  for (Index i = 0; i < 12; ++i) {
    std::vector<Index> rest;
    for (Index j = 0; j < 12; ++j) {
      if (j != i) rest.push_back(j);
    }
    const auto loo = fit(spec_of(ModelKind::mlr), ds.subset(rest), 1);
    const double e = ds.response()[i] - loo->predict(ds.location(i), ds.feature_row(i));
    CHECK(std::abs(e - resid[i] / (1.0 - h(i, i))) <= 1e-8);
  }
}

TEST_CASE("KED without drift columns is ordinary kriging") {
  const auto ds = test::meuse();
  const Dataset bare({}, ds.coords(), Eigen::MatrixXd(ds.size(), 0),
                     ds.response(), ResponseKind::regression);
  const auto ok = fit(spec_of(ModelKind::ok), bare, 1);
  const auto ked = fit(spec_of(ModelKind::ked), bare, 1);
  const std::vector<double> none;
  for (Index i = 0; i < ds.size(); i += 10) {
    const Location t{ds.coords()(i, 0) + 33.0, ds.coords()(i, 1) - 12.0};
    CHECK(ked->predict(t, none) == Approx(ok->predict(t, none)));
  }
}

TEST_CASE("KED with all meuse predictors") {
  const auto ds = test::meuse();
  const auto ked = fit(spec_of(ModelKind::ked), ds, 1);
  const auto s = ked->summary();
  CHECK(s["drift"].size() == 4);
  CHECK(s["trend_coefficients"].size() == 5);
  // kriging with measurement error smooths: residual RMSE is positive
  const auto pred = predict_all(*ked, ds);
  CHECK((pred - ds.response()).norm() > 0.0);
}

TEST_CASE("GWR with a huge bandwidth is the global regression") {
  const auto ds = test::linear_fixture(40, 11, 0.3);
  ModelSpec g = spec_of(ModelKind::gwr, {"noise"});
  g.gwr.bandwidth = 1e9;
  const auto gwr = fit(g, ds, 1);
  const auto mlr = fit(spec_of(ModelKind::mlr, {"noise"}), ds, 1);
  for (Index i = 0; i < 40; i += 5) {
    CHECK(gwr->predict(ds.location(i), ds.feature_row(i)) ==
          Approx(mlr->predict(ds.location(i), ds.feature_row(i))));
  }
}

TEST_CASE("GWR picks the bandwidth with the smallest LOO RMSE") {
  const auto ds = test::meuse();
  const auto m = fit(spec_of(ModelKind::gwr), ds, 1);
  const auto* gwr = dynamic_cast<const GwrModel*>(m.get());
  REQUIRE(gwr);
  const double best = gwr->loo_rmse(gwr->bandwidth());
  const auto s = gwr->summary();
  for (const auto& c : s["search"]) {
    if (c["loo_rmse"].is_null()) continue;  // singular local fits
    CHECK(best <= c["loo_rmse"].get<double>() + 1e-12);
  }
  CHECK(s["features"].size() == 2);  // coordinates excluded by default
}

TEST_CASE("random forest basics") {
  const Index n = 200;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = u(rng);
    y[i] = x(i, 0) > 0.5 ? 3.0 : -1.0;
  }
  RandomForest::Options opt;
  opt.n_trees = 100;
  opt.mtry = 3;
  const auto rf = RandomForest::train(x, y, opt, 42);
  const auto again = RandomForest::train(x, y, opt, 42);
  const std::vector<double> lo{0.2, 0.5, 0.5}, hi{0.8, 0.5, 0.5};
  CHECK(rf.predict(lo) == Approx(-1.0).epsilon(0.05));
  CHECK(rf.predict(hi) == Approx(3.0).epsilon(0.05));
  CHECK(rf.predict(lo) == again.predict(lo));
  CHECK(rf.n_trees() == 100);
  int total = 0;
  for (int c : rf.in_bag(0)) total += c;
  CHECK(total == n);
  double mean = 0.0;
  for (int t = 0; t < rf.n_trees(); ++t) mean += rf.tree_predict(t, hi);
  CHECK(rf.predict(hi) == Approx(mean / rf.n_trees()));

  // classification: majority vote over class codes
  Eigen::VectorXd cls(n);
  for (Index i = 0; i < n; ++i) cls[i] = x(i, 1) > 0.5 ? 1.0 : 0.0;
  opt.n_classes = 2;
  opt.min_node_size = 1;
  opt.mtry = 1;
  const auto rc = RandomForest::train(x, cls, opt, 7);
  CHECK(rc.predict(std::vector<double>{0.5, 0.9, 0.5}) == 1.0);
  CHECK(rc.predict(std::vector<double>{0.5, 0.1, 0.5}) == 0.0);
}

TEST_CASE("forest defaults follow the response kind") {
  const auto ds = test::meuse();
  const auto rf = fit(spec_of(ModelKind::rf), ds, 3)->summary();
  CHECK(rf["mtry"] == 1);
  CHECK(rf["min_node_size"] == 5);
  CHECK(rf["trees"] == 500);
  FieldSynthConfig fc;
  fc.n_fields = 12;
  const auto fields = synth_fields(fc);
  const auto rc = fit(spec_of(ModelKind::rf), fields, 3)->summary();
  CHECK(rc["mtry"] == 3);
  CHECK(rc["min_node_size"] == 1);
}

TEST_CASE("LDA separates Gaussian classes and ridges singular covariance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> e(0.0, 1.0);
  const Index n = 300;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd lab(n);
  for (Index i = 0; i < n; ++i) {
    lab[i] = static_cast<double>(i % 3);
    x(i, 0) = 4.0 * lab[i] + e(rng);
    x(i, 1) = e(rng);
  }
  const auto lda = LdaClassifier::train(x, lab, 3);
  CHECK_FALSE(lda.ridged());
  CHECK(lda.predict(std::vector<double>{0.0, 0.0}) == 0);
  CHECK(lda.predict(std::vector<double>{4.1, 0.0}) == 1);
  CHECK(lda.predict(std::vector<double>{8.5, 0.0}) == 2);
  CHECK(lda.priors().sum() == Approx(1.0));

  Eigen::MatrixXd dup(n, 3);
  dup << x, x.col(0);
  const auto ridged = LdaClassifier::train(dup, lab, 3);
  CHECK(ridged.ridged());
  CHECK(ridged.predict(std::vector<double>{8.5, 0.0, 8.5}) == 2);

  Eigen::VectorXd two = lab.unaryExpr([](double v) { return v == 2 ? 1.0 : v; });
  CHECK_THROWS_AS(LdaClassifier::train(x, two, 3), FitError);
}

TEST_CASE("response kind is checked") {
  const auto ds = test::meuse();
  CHECK_THROWS_AS(fit(spec_of(ModelKind::lda), ds, 1), FitError);
  FieldSynthConfig fc;
  fc.n_fields = 8;
  CHECK_THROWS_AS(fit(spec_of(ModelKind::ok), synth_fields(fc), 1), FitError);
  CHECK_THROWS_AS(fit(spec_of(ModelKind::mlr, {"zinc"}), ds, 1), SchemaError);
}

TEST_CASE("hybrids switch at their distances") {
  const auto ds = test::meuse();
  std::vector<Index> train;
  for (Index i = 0; i < ds.size(); ++i) {
    if (i % 3) train.push_back(i);
  }
  const auto sub = ds.subset(train);
  ModelSpec hyb = spec_of(ModelKind::ok_rf);
  hyb.forest.n_trees = 50;
  ModelSpec rfs = spec_of(ModelKind::rf);
  rfs.forest.n_trees = 50;
  const auto okrf = fit(hyb, sub, 9);
  const auto ok = fit(spec_of(ModelKind::ok), sub, 9);
  const auto rf = fit(rfs, sub, 9);
  // at a training location d = 0, so the blend is pure OK
  const auto t0 = sub.location(0);
  CHECK(okrf->predict(t0, sub.feature_row(0)) == ok->predict(t0, sub.feature_row(0)));
  // far outside the study area the blend is pure RF
  const Location far{ds.coords()(0, 0) + 5000.0, ds.coords()(0, 1)};
  CHECK(okrf->predict(far, ds.feature_row(0)) == rf->predict(far, ds.feature_row(0)));
  // in between it is the linear blend
  const Index i = 1;
  const double d = okrf->nearest_training_distance(ds.location(i));
  REQUIRE(d < 500.0);
  const double rho = d / 500.0;
  CHECK(okrf->predict(ds.location(i), ds.feature_row(i)) ==
        Approx(rho * rf->predict(ds.location(i), ds.feature_row(i)) +
               (1 - rho) * ok->predict(ds.location(i), ds.feature_row(i))));

  FieldSynthConfig fc;
  fc.n_fields = 16;
  const auto fields = synth_fields(fc);
  const auto nnlda = fit(spec_of(ModelKind::nn_lda), fields, 1);
  const auto lda = fit(spec_of(ModelKind::lda), fields, 1);
  const auto nn = fit(spec_of(ModelKind::nn), fields, 1);
  for (Index k = 0; k < fields.size(); k += 5) {
    const Location near{fields.coords()(k, 0) + 20.0, fields.coords()(k, 1)};
    CHECK(nnlda->predict(near, fields.feature_row(k)) ==
          nn->predict(near, fields.feature_row(k)));
    const Location out{fields.coords()(k, 0) + 1e5, fields.coords()(k, 1)};
    CHECK(nnlda->predict(out, fields.feature_row(k)) ==
          lda->predict(out, fields.feature_row(k)));
  }
}

}
