#include <spdiag/errors.hpp>
#include <spdiag/importance.hpp>

#include <cmath>

namespace spdiag {

Svip build_svip(std::span<const ProfileRecord> records,
                std::span<const std::string> channel_names,
                std::span<const double> breakpoints, ErrorMeasure measure,
                const BinningOptions& options, int window) {
  Svip out;
  out.clean = smooth_profile(
      bin_records(records, breakpoints, measure, options), window);
  const auto weights = triangular_weights(window);

  std::vector<double> d(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) d[k] = records[k].d;
  const auto bins = assign_bins(d, breakpoints);

  for (std::size_t c = 0; c < channel_names.size(); ++c) {
    ImportanceProfile prof;
    std::vector<double> raw;
    for (const auto& pt : out.clean.points) {
      std::vector<const ProfileRecord*> members;
      for (std::size_t k = 0; k < records.size(); ++k) {
        if (bins[k] == pt.bin) members.push_back(&records[k]);
      }
      std::size_t n_perm = 0;
      for (const auto* r : members) {
        if (r->permuted.size() <= c || r->permuted[c].empty()) {
          throw ConfigError("records lack permutation channel '" +
                            channel_names[c] + "'");
        }
        if (n_perm == 0) n_perm = r->permuted[c].size();
        if (r->permuted[c].size() != n_perm) {
          throw ConfigError("inconsistent permutation counts for '" +
                            channel_names[c] + "'");
        }
      }
      // Pooled over all replicates; per-replicate values feed the SE only.
      // The clean reference is pooled in the same layout so that unchanged
      // predictions give exactly zero.
      std::vector<double> obs, pred, clean;
      obs.reserve(members.size() * n_perm);
      pred.reserve(members.size() * n_perm);
      clean.reserve(members.size() * n_perm);
      std::vector<std::vector<double>> rep_pred(n_perm);
      std::vector<double> rep_obs;
      for (const auto* r : members) {
        rep_obs.push_back(r->y);
        for (std::size_t j = 0; j < n_perm; ++j) {
          obs.push_back(r->y);
          pred.push_back(r->permuted[c][j]);
          clean.push_back(r->y_hat);
          rep_pred[j].push_back(r->permuted[c][j]);
        }
      }
      ImportancePoint ip;
      ip.d_hat = pt.d_hat;
      ip.n_records = pt.n_records;
      ip.bin = pt.bin;
      ip.importance =
          error_measure(obs, pred, measure) - error_measure(obs, clean, measure);
      if (n_perm > 1) {
        std::vector<double> reps(n_perm);
        double mean = 0.0;
        for (std::size_t j = 0; j < n_perm; ++j) {
          reps[j] = error_measure(rep_obs, rep_pred[j], measure) - pt.value;
          mean += reps[j];
        }
        mean /= static_cast<double>(n_perm);
        double ss = 0.0;
        for (double v : reps) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n_perm - 1));
        ip.standard_error = sd / std::sqrt(static_cast<double>(n_perm));
      }
      raw.push_back(ip.importance);
      prof.points.push_back(ip);
    }
    prof.smoothed = smooth_values(raw, weights);
    out.channels[channel_names[c]] = std::move(prof);
  }
  return out;
}

}  // namespace spdiag
