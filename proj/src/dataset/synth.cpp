#include <spdiag/errors.hpp>
#include <spdiag/synth.hpp>

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

namespace spdiag {

Dataset synth_dataset(const SynthConfig& config) {
  const auto& v = config.variogram;
  if (config.n < 1) throw ParameterError("synthetic dataset needs n >= 1");
  if (!(config.extent > 0)) throw ParameterError("extent must be positive");
  if (v.me_var < 0 || v.psill < 0 || !(v.range > 0)) {
    throw ParameterError("invalid variogram parameters");
  }
  const Index n = config.n;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, config.extent);
  std::normal_distribution<double> normal(0.0, 1.0);

  Coordinates coords(n, 2);
  for (Index i = 0; i < n; ++i) {
    coords(i, 0) = unif(rng);
    coords(i, 1) = unif(rng);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  if (v.psill > 0) {
    Eigen::MatrixXd c(n, n);
    for (Index i = 0; i < n; ++i) {
      c(i, i) = v.psill;
      for (Index j = 0; j < i; ++j) {
        const double h = std::hypot(coords(i, 0) - coords(j, 0),
                                    coords(i, 1) - coords(j, 1));
        c(i, j) = c(j, i) = v.covariance(h);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      throw ParameterError("field covariance is not positive definite");
    }
    Eigen::VectorXd e(n);
    for (Index i = 0; i < n; ++i) e[i] = normal(rng);
    z = llt.matrixL() * e;
  }
  if (v.me_var > 0) {
    const double sd = std::sqrt(v.me_var);
    for (Index i = 0; i < n; ++i) z[i] += sd * normal(rng);
  }
  for (Index i = 0; i < n; ++i) {
    z[i] += config.intercept + config.slope_x * coords(i, 0) +
            config.slope_y * coords(i, 1);
  }
  Eigen::MatrixXd features = coords;
  return Dataset({"x", "y"}, std::move(coords), std::move(features),
                 std::move(z), ResponseKind::regression, {}, std::nullopt,
                 {0, 1});
}

Dataset synth_fields(const FieldSynthConfig& cfg) {
  if (cfg.n_fields < cfg.n_classes || cfg.n_classes < 2) {
    throw ParameterError("need at least 2 classes and one field per class");
  }
  if (cfg.cells_per_side < 1 || !(cfg.cell_size > 0) || cfg.min_gap < 0) {
    throw ParameterError("invalid field geometry");
  }
  if (cfg.block_sizes.empty()) throw ParameterError("no feature blocks");
  if (cfg.block_correlation < 0 || cfg.block_correlation >= 1 ||
      cfg.field_effect < 0 || cfg.field_effect > 1) {
    throw ParameterError("correlation and field effect must lie in [0, 1)");
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double side = (cfg.cells_per_side - 1) * cfg.cell_size;
  std::uniform_real_distribution<double> corner(0.0, cfg.extent - side);

  // lower-left cell centres of the fields, separated edge to edge
  std::vector<std::pair<double, double>> origins;
  for (int f = 0; f < cfg.n_fields; ++f) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const double x = corner(rng), y = corner(rng);
      placed = true;
      for (const auto& [ox, oy] : origins) {
        const double dx = std::max(0.0, std::abs(x - ox) - side);
        const double dy = std::max(0.0, std::abs(y - oy) - side);
        if (std::hypot(dx, dy) < cfg.min_gap) {
          placed = false;
          break;
        }
      }
      if (placed) origins.emplace_back(x, y);
    }
    if (!placed) throw ParameterError("cannot place fields in the extent");
  }

  int p = 0;
  std::vector<std::string> names;
  static const char* kBlockNames[] = {"early", "mid", "late"};
  for (std::size_t b = 0; b < cfg.block_sizes.size(); ++b) {
    const std::string prefix = cfg.block_sizes.size() == 3
                                   ? kBlockNames[b]
                                   : "block" + std::to_string(b + 1) + "_";
    for (int j = 0; j < cfg.block_sizes[b]; ++j) {
      names.push_back(prefix + std::to_string(j + 1));
      ++p;
    }
  }
  const double rho = cfg.block_correlation;
  // Class means share the block correlation of the noise, so separation is
  // the same in every direction of the feature space.
  Eigen::MatrixXd class_means(cfg.n_classes, p);
  for (int c = 0; c < cfg.n_classes; ++c) {
    int j = 0;
    for (int size : cfg.block_sizes) {
      const double common = normal(rng);
      for (int k = 0; k < size; ++k, ++j) {
        class_means(c, j) =
            cfg.class_separation *
            (std::sqrt(rho) * common + std::sqrt(1 - rho) * normal(rng));
      }
    }
  }

  auto block_noise = [&](Eigen::Ref<Eigen::RowVectorXd> out) {
    int j = 0;
    for (int size : cfg.block_sizes) {
      const double common = normal(rng);
      for (int k = 0; k < size; ++k, ++j) {
        out[j] = std::sqrt(rho) * common + std::sqrt(1 - rho) * normal(rng);
      }
    }
  };

  const int cells = cfg.cells_per_side * cfg.cells_per_side;
  const Index n = static_cast<Index>(cfg.n_fields) * cells;
  Coordinates coords(n, 2);
  Eigen::MatrixXd features(n, p);
  Eigen::VectorXd response(n);
  std::vector<int> groups(static_cast<std::size_t>(n));
  Eigen::RowVectorXd field_noise(p), cell_noise(p);
  Index row = 0;
  for (int f = 0; f < cfg.n_fields; ++f) {
    const int cls = f % cfg.n_classes;
    block_noise(field_noise);
    for (int a = 0; a < cfg.cells_per_side; ++a) {
      for (int b = 0; b < cfg.cells_per_side; ++b, ++row) {
        coords(row, 0) = origins[f].first + a * cfg.cell_size;
        coords(row, 1) = origins[f].second + b * cfg.cell_size;
        block_noise(cell_noise);
        features.row(row) = class_means.row(cls) +
                            std::sqrt(cfg.field_effect) * field_noise +
                            std::sqrt(1 - cfg.field_effect) * cell_noise;
        response[row] = cls;
        groups[row] = f;
      }
    }
  }
  std::vector<std::string> labels;
  for (int c = 0; c < cfg.n_classes; ++c) {
    labels.push_back("class" + std::to_string(c + 1));
  }
  return Dataset(std::move(names), std::move(coords), std::move(features),
                 std::move(response), ResponseKind::classification,
                 std::move(labels), std::move(groups));
}

}  // namespace spdiag
