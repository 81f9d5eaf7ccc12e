#include <spdiag/errors.hpp>
#include <spdiag/parallel.hpp>
#include <spdiag/spatial_loo.hpp>

#include <mutex>
#include <optional>
#include <random>

namespace spdiag {

void DiagnosticsConfig::validate() const {
  if (!(r_min <= r_max)) throw ConfigError("r_min must not exceed r_max");
  if (n_reps < 1) throw ConfigError("n_reps must be at least 1");
  if (n_bins < 2) throw ConfigError("n_bins must be at least 2");
  if (n_perm < 1) throw ConfigError("n_perm must be at least 1");
  if (min_bin_records < 1) throw ConfigError("min_bin_records must be >= 1");
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw ConfigError("smoothing_window must be odd and positive");
  }
}

namespace {

enum class Outcome { ok, exhausted, failed };

Outcome run_iteration(const Dataset& ds, const ModelSpec& spec,
                      const DiagnosticsConfig& cfg,
                      std::span<const PermutationChannel> channels,
                      std::size_t iteration, ProfileRecord& rec) {
  std::mt19937_64 rng(mix_seed(cfg.seed, iteration));
  std::uniform_int_distribution<Index> pick(0, ds.size() - 1);
  std::uniform_real_distribution<double> radius(cfg.r_min, cfg.r_max);
  const Index i = pick(rng);
  const double r = radius(rng);
  const std::uint64_t model_seed = rng();

  BufferSplit split;
  try {
    split = buffer_exclude(ds, i, r);
  } catch (const ExhaustedBufferError&) {
    return Outcome::exhausted;
  }
  std::unique_ptr<FittedModel> model;
  try {
    model = fit(spec, ds.subset(split.train), model_seed);
  } catch (const FitError&) {
    return Outcome::failed;
  } catch (const NumericError&) {
    return Outcome::failed;
  } catch (const EstimationError&) {
    return Outcome::failed;
  }

  const auto row = ds.feature_row(i);
  const Location target = ds.location(i);
  rec.iteration = iteration;
  rec.target = i;
  rec.r = r;
  rec.d = split.d_actual;
  rec.y = ds.response()[i];
  rec.y_hat = model->predict(target, row);
  rec.train_size = static_cast<Index>(split.train.size());
  rec.permuted.clear();
  rec.permuted.reserve(channels.size());
  for (const auto& ch : channels) {
    rec.permuted.push_back(
        permuted_predictions(*model, target, row, ch, ds, cfg.n_perm, rng));
  }
  return Outcome::ok;
}

}  // namespace

LooRun run_spatial_loo(const Dataset& ds, const ModelSpec& spec,
                       const DiagnosticsConfig& cfg,
                       std::span<const PermutationChannel> channels) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_reps);
  std::vector<std::optional<ProfileRecord>> slots(n);
  std::vector<Outcome> outcomes(n, Outcome::ok);

  parallel_for(n, resolve_threads(cfg.threads), [&](std::size_t it) {
    ProfileRecord rec;
    outcomes[it] = run_iteration(ds, spec, cfg, channels, it, rec);
    if (outcomes[it] == Outcome::ok) slots[it] = std::move(rec);
  });

  LooRun run;
  for (const auto& ch : channels) run.channels.push_back(ch.name);
  run.records.reserve(n);
  for (std::size_t it = 0; it < n; ++it) {
    if (outcomes[it] == Outcome::exhausted) ++run.skipped_exhausted;
    if (outcomes[it] == Outcome::failed) ++run.skipped_failed;
    if (slots[it]) run.records.push_back(std::move(*slots[it]));
  }
  const Index skipped = run.skipped_exhausted + run.skipped_failed;
  if (2 * skipped > static_cast<Index>(n)) {
    throw ConfigError(std::to_string(skipped) + " of " + std::to_string(n) +
                      " iterations skipped (" +
                      std::to_string(run.skipped_exhausted) +
                      " exhausted buffers); r_max is too large for the domain "
                      "or the model cannot be fitted");
  }
  return run;
}

std::vector<double> profile_breakpoints(const DiagnosticsConfig& cfg) {
  if (!(cfg.r_max > 0.0)) throw ConfigError("profiles need r_max > 0");
  return quadratic_breakpoints(0.0, cfg.r_max, cfg.n_bins);
}

Profile spep(const LooRun& run, const DiagnosticsConfig& cfg) {
  const auto b = profile_breakpoints(cfg);
  auto p = bin_records(run.records, b, cfg.measure, {cfg.min_bin_records});
  return smooth_profile(std::move(p), cfg.smoothing_window);
}

Svip svip(const LooRun& run, const DiagnosticsConfig& cfg) {
  return build_svip(run.records, run.channels, profile_breakpoints(cfg),
                    cfg.measure, {cfg.min_bin_records}, cfg.smoothing_window);
}

double mean_training_size(const Dataset& ds, double r) {
  const Index n = ds.size();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index inside = r < 0 ? 1 : ds.index().count_within(ds.location(i), r);
    total += static_cast<double>(n - inside);
  }
  return total / static_cast<double>(n);
}

}  // namespace spdiag
