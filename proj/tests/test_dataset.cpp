#include "support.hpp"

#include <spdiag/dataset.hpp>
#include <spdiag/errors.hpp>
#include <spdiag/synth.hpp>

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace spdiag;
using spdiag::test::brute_nearest;

TEST_SUITE("dataset") {

TEST_CASE("meuse loads with coordinate features first") {
  const auto ds = test::meuse();
  CHECK(ds.size() == 155);
  CHECK(ds.feature_names() ==
        std::vector<std::string>{"x", "y", "sqrt.dist", "elev"});
  CHECK(ds.x_feature() == 0);
  CHECK(ds.y_feature() == 1);
  CHECK(ds.features()(0, 0) == ds.coords()(0, 0));
  CHECK_FALSE(ds.has_duplicate_locations());
  CHECK_THROWS_AS(ds.feature_index("zinc"), SchemaError);
}

TEST_CASE("csv errors carry the data row") {
  test::TempDir dir;
  const auto p = dir.write("bad.csv", "x,y,z,f\n0,0,1,2\n1,1,NA,3\n2,2,3,4\n");
  CsvSchema s;
  s.response = "z";
  s.features = {"f"};
  try {
    load_csv(p.string(), s);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
  }
  s.features = {"g"};
  CHECK_THROWS_AS(load_csv(p.string(), s), SchemaError);

  const auto q = dir.write("quoted.csv",
                           "\xEF\xBB\xBFx,\"y\",label\n0,0,\"b\"\n1,0,a\n2,0,b\n");
  CsvSchema c;
  c.response = "label";
  c.kind = ResponseKind::classification;
  const auto ds = load_csv(q.string(), c);
  CHECK(ds.class_labels() == std::vector<std::string>{"a", "b"});
  CHECK(ds.response()[0] == 1);
  CHECK(ds.response()[1] == 0);
}

TEST_CASE("kd-tree queries agree with brute force") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  Coordinates pts(300, 2);
  for (Index i = 0; i < pts.rows(); ++i) {
    // a coarse lattice produces exact ties
    pts(i, 0) = std::floor(u(rng) / 5.0) * 5.0;
    pts(i, 1) = std::floor(u(rng) / 5.0) * 5.0;
  }
  const KdTree tree(pts);
  for (int q = 0; q < 200; ++q) {
    const Location at{u(rng), u(rng)};
    const auto nb = tree.nearest(at);
    const double want = brute_nearest(pts, at.x, at.y);
    CHECK(nb.distance == want);
    Index lowest = -1;
    for (Index j = 0; j < pts.rows(); ++j) {
      if (std::hypot(pts(j, 0) - at.x, pts(j, 1) - at.y) == want) {
        lowest = j;
        break;
      }
    }
    CHECK(nb.index == lowest);

    const double r = u(rng) / 4.0;
    std::vector<Index> inside;
    for (Index j = 0; j < pts.rows(); ++j) {
      if (std::hypot(pts(j, 0) - at.x, pts(j, 1) - at.y) <= r) {
        inside.push_back(j);
      }
    }
    CHECK(tree.within(at, r) == inside);
    CHECK(tree.count_within(at, r) == static_cast<Index>(inside.size()));

    const auto odd = tree.nearest_if(at, [](Index j, double) { return j % 2; });
    double best = INFINITY;
    for (Index j = 1; j < pts.rows(); j += 2) {
      best = std::min(best, std::hypot(pts(j, 0) - at.x, pts(j, 1) - at.y));
    }
    REQUIRE(odd);
    CHECK(odd->distance == best);
  }
}

TEST_CASE("nearest-neighbour and grid distances equal brute force") {
  const auto ds = test::meuse();
  const auto nn = nearest_neighbour_distances(ds);
  for (Index i = 0; i < ds.size(); ++i) {
    CHECK(nn[i] == brute_nearest(ds.coords(), ds.coords()(i, 0),
                                 ds.coords()(i, 1), i));
  }
  const auto grid = test::meuse_grid();
  CHECK(grid.size() == 3103);
  const auto pd = prediction_distances(ds, grid);
  for (std::size_t k = 0; k < grid.size(); k += 7) {
    CHECK(pd[k] == brute_nearest(ds.coords(), grid[k].x, grid[k].y));
  }
}

TEST_CASE("quantiles and histogram") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted(v, 1.0) == 4.0);

  const std::vector<double> d{0, 5, 10, 10, 25, 39.9};
  HistogramSpec hs;
  hs.bin_width = 10.0;
  const auto s = summarize_distances(d, hs);
  CHECK(s.histogram.edges == std::vector<double>{0, 10, 20, 30, 40});
  CHECK(s.histogram.counts == std::vector<Index>{2, 2, 1, 1});
  CHECK(s.count == 6);
  CHECK(s.mean == doctest::Approx(89.9 / 6));

  const auto t = summarize_distances(d);
  CHECK(t.histogram.edges.size() == 31);
  CHECK(t.histogram.edges.back() == doctest::Approx(39.9));
  Index total = 0;
  for (auto c : t.histogram.counts) total += c;
  CHECK(total == 6);
  CHECK_THROWS_AS(summarize_distances(std::vector<double>{}), EstimationError);
}

TEST_CASE("buffer exclusion retains nothing within r") {
  const auto ds = test::meuse();
  for (Index i : {0, 17, 80, 154}) {
    for (double r : {-1.0, 0.0, 100.0, 400.0, 1500.0}) {
      const auto split = buffer_exclude(ds, i, r);
      CHECK(std::find(split.train.begin(), split.train.end(), i) ==
            split.train.end());
      double nearest = INFINITY;
      for (Index j : split.train) {
        const double d = std::hypot(ds.coords()(j, 0) - ds.coords()(i, 0),
                                    ds.coords()(j, 1) - ds.coords()(i, 1));
        if (r >= 0) CHECK(d > r);
        nearest = std::min(nearest, d);
      }
      CHECK(split.d_actual == nearest);
      CHECK(split.d_actual >= std::max(r, 0.0));
      if (r < 0) CHECK(split.train.size() == 154);
    }
  }
  CHECK_THROWS_AS(buffer_exclude(ds, 0, 1e6), ExhaustedBufferError);
}

TEST_CASE("duplicate locations are flagged and excluded together") {
  Coordinates c(3, 2);
  c << 0, 0, 0, 0, 10, 0;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 1);
  const Dataset ds({"f"}, c, f, Eigen::Vector3d(1, 2, 3),
                   ResponseKind::regression);
  CHECK(ds.has_duplicate_locations());
  const auto split = buffer_exclude(ds, 0, 0.0);
  CHECK(split.train == std::vector<Index>{2});
  CHECK(nearest_neighbour_distances(ds)[0] == 10.0);
}

TEST_CASE("subset keeps schema and coordinate roles") {
  const auto ds = test::meuse();
  const std::vector<Index> rows{5, 3, 9};
  const auto sub = ds.subset(rows);
  CHECK(sub.size() == 3);
  CHECK(sub.feature_names() == ds.feature_names());
  CHECK(sub.x_feature() == 0);
  CHECK(sub.response()[1] == ds.response()[3]);
  CHECK(sub.coords()(2, 1) == ds.coords()(9, 1));
}

TEST_CASE("synthetic fields fixture") {
  FieldSynthConfig cfg;
  cfg.n_fields = 12;
  const auto ds = synth_fields(cfg);
  CHECK(ds.size() == 12 * 9);
  CHECK(ds.num_classes() == 4);
  CHECK(ds.num_features() == 12);
  CHECK(ds.feature_names().front() == "early1");
  CHECK(ds.feature_names().back() == "late6");
  CHECK_FALSE(ds.x_feature());
  REQUIRE(ds.has_groups());
  std::set<int> fields(ds.groups().begin(), ds.groups().end());
  CHECK(fields.size() == 12);
  for (Index i = 0; i < ds.size(); ++i) {
    CHECK(ds.response()[i] == ds.groups()[i] % 4);
  }
  // reproducible
  const auto again = synth_fields(cfg);
  CHECK(again.features() == ds.features());
}

}
