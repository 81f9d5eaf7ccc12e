#include "internal.hpp"

#include <spdiag/errors.hpp>
#include <spdiag/kriging.hpp>

#include <Eigen/QR>
#include <optional>

namespace spdiag::detail {

namespace {

nlohmann::json variogram_json(const VariogramFit& fit) {
  return {{"model", "spherical"},
          {"me_var", fit.model.me_var},
          {"psill", fit.model.psill},
          {"range", fit.model.range},
          {"converged", fit.converged},
          {"iterations", fit.iterations}};
}

// Global ordinary kriging, or kriging with external drift in the selected
// features. The KED residual variogram is fitted to OLS residuals of the
// trend (one pass).
class KrigingModel final : public FittedModel {
 public:
  KrigingModel(const ModelSpec& spec, const Dataset& train, std::uint64_t seed)
      : FittedModel(train, seed),
        drift_(spec.kind == ModelKind::ked ? resolve_features(spec, train)
                                           : std::vector<Index>{}),
        system_(assemble(spec, train)) {}

  ModelKind kind() const override {
    return ked_ ? ModelKind::ked : ModelKind::ok;
  }

  double predict(const Location& target,
                 std::span<const double> features) const override {
    Eigen::VectorXd f(static_cast<Index>(drift_.size()) + 1);
    f[0] = 1.0;
    for (std::size_t j = 0; j < drift_.size(); ++j) {
      f[static_cast<Index>(j) + 1] = features[drift_[j]];
    }
    return system_->predict(target, f).value;
  }

  nlohmann::json summary() const override {
    nlohmann::json out = {{"kind", to_string(kind())},
                          {"training_size", training_size()},
                          {"variogram", variogram_json(fit_)}};
    if (!drift_.empty()) {
      out["drift"] = feature_list(schema_, drift_);
      const Eigen::VectorXd beta = system_->trend_coefficients();
      out["trend_coefficients"] = std::vector<double>(beta.begin(), beta.end());
    }
    return out;
  }

 private:
  KrigingSystem assemble(const ModelSpec& spec, const Dataset& train) {
    ked_ = spec.kind == ModelKind::ked;
    const Index n = train.size();
    Eigen::MatrixXd trend(n, static_cast<Index>(drift_.size()) + 1);
    trend.col(0).setOnes();
    for (std::size_t j = 0; j < drift_.size(); ++j) {
      trend.col(static_cast<Index>(j) + 1) = train.features().col(drift_[j]);
    }
    Eigen::VectorXd target = train.response();
    if (!drift_.empty()) {
      if (n <= trend.cols()) throw FitError("too few observations for KED");
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trend);
      if (qr.rank() < trend.cols()) {
        throw FitError("KED drift design is rank deficient");
      }
      target = train.response() - trend * qr.solve(train.response());
    }
    const LagLayout layout =
        spec.lags ? *spec.lags : default_lag_layout(train.coords());
    try {
      fit_ = fit_variogram(target, train.coords(), layout);
      return KrigingSystem(train.coords(), train.response(), std::move(trend),
                           fit_.model);
    } catch (const EstimationError& e) {
      throw FitError(std::string("variogram: ") + e.what());
    } catch (const NumericError& e) {
      throw FitError(std::string("kriging: ") + e.what());
    }
  }

  std::vector<Index> drift_;
  bool ked_ = false;
  VariogramFit fit_;
  std::optional<KrigingSystem> system_;
};

}  // namespace

std::unique_ptr<FittedModel> make_kriging(const ModelSpec& spec,
                                          const Dataset& train,
                                          std::uint64_t seed) {
  return std::make_unique<KrigingModel>(spec, train, seed);
}

}  // namespace spdiag::detail
