#include <spdiag/cli.hpp>
#include <spdiag/errors.hpp>
#include <spdiag/svg.hpp>

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cctype>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace spdiag::cli {

using nlohmann::json;

namespace {

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return out;
}

/// Shared state of one command invocation.
class Run {
 public:
  Run(std::string command, const ExperimentConfig& cfg,
      const Overrides& overrides, std::ostream& log)
      : command_(std::move(command)), cfg_(cfg), log_(log) {
    manifest_ = {{"tool", "spdiag"},
                 {"command", command_},
                 {"config_hash", fnv1a_hex(cfg.text)},
                 {"seed", cfg.seed},
                 {"versions",
                  {{"spdiag", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json",
                    std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}}}};
    json ov = json::object();
    if (overrides.seed) ov["seed"] = *overrides.seed;
    if (overrides.reps) ov["reps"] = *overrides.reps;
    manifest_["overrides"] = ov;
    manifest_["models"] = json::array();
    manifest_["files"] = json::array();
  }

  const ExperimentConfig& cfg() const { return cfg_; }
  std::ostream& log() { return log_; }
  json& manifest() { return manifest_; }

  void write(const std::string& name, const std::string& text) {
    write_file(cfg_.output_dir, name, text);
    manifest_["files"].push_back(name);
  }

  void write_json(const std::string& name, const json& j) {
    write(name, j.dump(2) + "\n");
  }

  /// Plots are left out of the manifest so numeric outputs stay identical
  /// with and without --no-plots.
  void plot(const std::string& name, std::span<const svg::Panel> panels,
            int columns, const std::string& title) {
    if (!cfg_.plots.enabled) return;
    write_file(cfg_.output_dir, name, svg::render(panels, columns, title));
  }

  void status(const std::string& model, const std::string& stage,
              const std::string& error, json extra = json::object()) {
    extra["model"] = model;
    extra["stage"] = stage;
    extra["status"] = error.empty() ? "ok" : "failed";
    if (!error.empty()) {
      extra["error"] = error;
      failed_ = true;
    }
    manifest_["models"].push_back(extra);
    log_ << "[" << command_ << "] " << model << " (" << stage
         << "): " << (error.empty() ? "ok" : "FAILED: " + error) << "\n";
  }

  int finish() {
    write_json("manifest_" + command_ + ".json", manifest_);
    return failed_ ? kPartialFailure : kOk;
  }

 private:
  std::string command_;
  const ExperimentConfig& cfg_;
  std::ostream& log_;
  json manifest_;
  bool failed_ = false;
};

json dataset_json(const ExperimentConfig& cfg, const Dataset& ds) {
  json j = {{"rows", ds.size()}, {"features", ds.feature_names()}};
  if (cfg.synthetic) {
    j["source"] = "synthetic_fields";
    j["synthetic_seed"] = cfg.synthetic->seed;
  } else {
    j["source"] = cfg.dataset_path.filename().string();
    j["response"] = cfg.schema.response;
  }
  return j;
}

json diagnostics_json(const DiagnosticsConfig& d) {
  return {{"r_min", d.r_min},     {"r_max", d.r_max},
          {"n_reps", d.n_reps},   {"n_bins", d.n_bins},
          {"n_perm", d.n_perm},   {"measure", to_string(d.measure)},
          {"seed", d.seed},       {"min_bin_records", d.min_bin_records},
          {"smoothing_window", d.smoothing_window}};
}

std::string measure_label(ErrorMeasure m) {
  return m == ErrorMeasure::rmse ? "RMSE" : "Error rate";
}

svg::Series profile_series(const std::string& name, const Profile& p,
                           int colour) {
  svg::Series s{name, {}, {}, colour};
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    s.x.push_back(p.points[k].d_hat);
    s.y.push_back(p.smoothed[k]);
  }
  return s;
}

/// CV estimates plotted at their mean prediction distance.
void cv_markers(Run& run, const Dataset& ds, const ModelSpec& spec, int colour,
                std::vector<svg::Marker>& markers) {
  const auto& cfg = run.cfg();
  for (const auto& scheme : cfg.cv) {
    const std::string tag = to_string(scheme.kind);
    try {
      const auto r = run_cv(ds, spec, scheme, cfg.diagnostics.measure,
                            cfg.histogram);
      run.write_json("cv_" + tag + "_" + slug(spec.label()) + ".json",
                     to_json(r));
      markers.push_back({spec.label() + " " + tag, r.mean_distance,
                         r.estimate, colour});
      run.status(spec.label(), "cv " + tag, "");
    } catch (const Error& e) {
      run.status(spec.label(), "cv " + tag, e.what());
    }
  }
}

int cmd_spep(Run& run, const Dataset& ds) {
  const auto& cfg = run.cfg();
  std::vector<svg::Series> series;
  std::vector<svg::Marker> markers;
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    const auto& spec = cfg.models[m];
    const std::string name = slug(spec.label());
    const int colour = static_cast<int>(m);
    try {
      const auto loo = run_spatial_loo(ds, spec, cfg.diagnostics);
      const auto prof = spep(loo, cfg.diagnostics);
      run.write("spep_" + name + "_records.csv", records_csv(loo));
      run.write("spep_" + name + "_profile.csv", profile_csv(prof));
      run.write_json("spep_" + name + "_profile.json", to_json(prof));
      series.push_back(profile_series(spec.label(), prof, colour));
      run.status(spec.label(), "spep", "",
                 {{"records", loo.records.size()},
                  {"skipped_exhausted", loo.skipped_exhausted},
                  {"skipped_failed", loo.skipped_failed}});
    } catch (const Error& e) {
      run.status(spec.label(), "spep", e.what());
    }
    cv_markers(run, ds, spec, colour, markers);
  }
  svg::Panel panel;
  panel.title = "Spatial prediction error profile";
  panel.xlabel = "Prediction distance (m)";
  panel.ylabel = measure_label(cfg.diagnostics.measure);
  panel.sqrt_x = cfg.plots.sqrt_axis;
  panel.series = std::move(series);
  panel.markers = std::move(markers);
  run.plot("spep.svg", std::span<const svg::Panel>(&panel, 1), 1, "SPEP");
  return run.finish();
}

std::vector<PermutationChannel> make_channels(Run& run, const Dataset& ds) {
  const auto& imp = run.cfg().importance;
  std::vector<PermutationChannel> channels;
  for (const auto& f : imp.features) {
    channels.push_back(PermutationChannel::for_feature(ds, f));
  }
  const auto groups = fit_pc_groups(ds, imp.groups);
  json gj = json::array();
  for (const auto& g : groups) {
    auto shared = std::make_shared<const FeatureGroup>(g);
    const Index k =
        std::min<Index>(imp.components, static_cast<Index>(g.members.size()));
    for (Index c = 0; c < k; ++c) {
      channels.push_back(PermutationChannel::for_component(shared, c));
    }
    for (const auto& d : g.dropped) {
      run.log() << "[svip] warning: zero-variance feature '" << d
                << "' dropped from group " << g.name << "\n";
    }
    const double total = g.explained_variance.sum();
    std::vector<double> share;
    for (Index c = 0; c < g.explained_variance.size(); ++c) {
      share.push_back(total > 0 ? g.explained_variance[c] / total : 0.0);
    }
    gj.push_back({{"name", g.name}, {"dropped", g.dropped},
                  {"explained_share", share}});
  }
  run.manifest()["groups"] = gj;
  if (channels.empty()) {
    throw ConfigError("svip needs importance.features or importance.groups");
  }
  return channels;
}

int cmd_svip(Run& run, const Dataset& ds) {
  const auto& cfg = run.cfg();
  const auto channels = make_channels(run, ds);
  std::map<std::string, svg::Panel> panels;
  for (const auto& ch : channels) {
    auto& p = panels[ch.name];
    p.title = ch.name;
    p.xlabel = "Prediction distance (m)";
    p.ylabel = "Importance (" + measure_label(cfg.diagnostics.measure) + ")";
    p.sqrt_x = cfg.plots.sqrt_axis;
    p.zero_line = true;
  }
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    const auto& spec = cfg.models[m];
    const std::string name = slug(spec.label());
    try {
      const auto loo = run_spatial_loo(ds, spec, cfg.diagnostics, channels);
      const auto s = svip(loo, cfg.diagnostics);
      run.write("svip_" + name + "_records.csv", records_csv(loo));
      run.write("svip_" + name + "_profile.csv", profile_csv(s.clean));
      run.write("svip_" + name + ".csv", svip_csv(s));
      run.write_json("svip_" + name + ".json", to_json(s));
      for (const auto& [ch, prof] : s.channels) {
        svg::Series ser{spec.label(), {}, {}, static_cast<int>(m)};
        for (std::size_t k = 0; k < prof.points.size(); ++k) {
          ser.x.push_back(prof.points[k].d_hat);
          ser.y.push_back(prof.smoothed[k]);
        }
        panels[ch].series.push_back(std::move(ser));
      }
      run.status(spec.label(), "svip", "",
                 {{"records", loo.records.size()},
                  {"skipped_exhausted", loo.skipped_exhausted},
                  {"skipped_failed", loo.skipped_failed}});
    } catch (const Error& e) {
      run.status(spec.label(), "svip", e.what());
    }
  }
  std::vector<svg::Panel> ordered;
  for (const auto& ch : channels) ordered.push_back(panels[ch.name]);
  run.plot("svip.svg", ordered, 2, "SVIP");
  return run.finish();
}

int cmd_compare(Run& run, const Dataset& ds) {
  const auto& cfg = run.cfg();
  if (cfg.cv.empty()) throw ConfigError("compare needs at least one cv entry");
  std::ostringstream csv, table;
  csv << "estimator,model,error,mean_distance,repetitions,redraws\n";
  table << std::left << std::setw(16) << "estimator" << std::setw(14)
        << "model" << std::right << std::setw(12) << "error" << std::setw(14)
        << "mean_dist_m" << "\n";
  for (const auto& scheme : cfg.cv) {
    const std::string tag = to_string(scheme.kind);
    for (const auto& spec : cfg.models) {
      try {
        const auto r = run_cv(ds, spec, scheme, cfg.diagnostics.measure,
                              cfg.histogram);
        run.write_json("cv_" + tag + "_" + slug(spec.label()) + ".json",
                       to_json(r));
        csv << tag << ',' << spec.label() << ',' << format_double(r.estimate)
            << ',' << format_double(r.mean_distance) << ','
            << r.per_repetition.size() << ',' << r.redraws << '\n';
        table << std::left << std::setw(16) << tag << std::setw(14)
              << spec.label() << std::right << std::fixed
              << std::setprecision(4) << std::setw(12) << r.estimate
              << std::setprecision(1) << std::setw(14) << r.mean_distance
              << "\n";
        run.status(spec.label(), "cv " + tag, "");
      } catch (const Error& e) {
        csv << tag << ',' << spec.label() << ",NA,NA,0,0\n";
        table << std::left << std::setw(16) << tag << std::setw(14)
              << spec.label() << std::right << std::setw(12) << "failed"
              << "\n";
        run.status(spec.label(), "cv " + tag, e.what());
      }
    }
  }
  run.write("compare.csv", csv.str());
  run.write("compare.txt", table.str());
  run.log() << table.str();
  return run.finish();
}

int cmd_disthist(Run& run, const Dataset& ds) {
  const auto& cfg = run.cfg();
  if (!cfg.grid_path && cfg.cv.empty()) {
    throw ConfigError("disthist needs a grid or cv entries");
  }
  std::vector<std::pair<std::string, DistanceSummary>> scenarios;
  std::vector<std::vector<double>> raw;
  if (cfg.grid_path) {
    if (!std::filesystem::exists(*cfg.grid_path)) {
      throw ConfigError("grid file " + cfg.grid_path->string() +
                        " does not exist");
    }
    const auto grid =
        load_locations_csv(cfg.grid_path->string(), cfg.grid_x, cfg.grid_y);
    raw.push_back(prediction_distances(ds, grid));
    scenarios.emplace_back("prediction",
                           summarize_distances(raw.back(), cfg.histogram));
  }
  std::map<std::string, int> used;
  for (const auto& scheme : cfg.cv) {
    std::string tag = to_string(scheme.kind);
    if (used[tag]++ > 0) tag += "_" + std::to_string(used[tag]);
    Index redraws = 0;
    const auto folds = make_folds(ds, scheme, &redraws);
    raw.push_back(cv_prediction_distances(
        ds, folds, scheme.kind == CvKind::resubstitution));
    scenarios.emplace_back(tag, summarize_distances(raw.back(), cfg.histogram));
  }
  std::vector<svg::Panel> panels;
  json index = json::array();
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& [tag, s] = scenarios[k];
    run.write_json("disthist_" + tag + ".json", to_json(s));
    run.write("disthist_" + tag + "_histogram.csv", histogram_csv(s));
    run.write("disthist_" + tag + "_distances.csv", distances_csv(raw[k]));
    index.push_back({{"scenario", tag}, {"mean", s.mean}, {"count", s.count}});
    run.log() << "[disthist] " << tag << ": n=" << s.count
              << " mean=" << format_double(s.mean) << " m\n";
    svg::Panel p;
    p.title = tag + " (mean " + std::to_string(static_cast<long>(std::lround(s.mean))) + " m)";
    p.xlabel = "Prediction distance (m)";
    p.ylabel = "Count";
    p.histogram = s.histogram;
    panels.push_back(std::move(p));
  }
  run.manifest()["scenarios"] = index;
  run.plot("disthist.svg", panels, 2, "Prediction distance distributions");
  return run.finish();
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg,
                const Overrides& overrides, std::ostream& log) {
  if (command != "spep" && command != "svip" && command != "compare" &&
      command != "disthist") {
    throw ConfigError("unknown command '" + command + "'");
  }
  const Dataset ds = load_dataset(cfg);
  validate_experiment(cfg, ds);
  Run run(command, cfg, overrides, log);
  run.manifest()["dataset"] = dataset_json(cfg, ds);
  run.manifest()["diagnostics"] = diagnostics_json(cfg.diagnostics);
  if (command == "spep") return cmd_spep(run, ds);
  if (command == "svip") return cmd_svip(run, ds);
  if (command == "compare") return cmd_compare(run, ds);
  return cmd_disthist(run, ds);
}

int main(int argc, char** argv) {
  CLI::App app{"Spatial prediction error and variable importance profiles"};
  app.require_subcommand(1, 1);
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<std::string> out;
  bool no_plots = false;
  for (const char* name : {"spep", "svip", "compare", "disthist"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "Experiment config file")->required();
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--reps", reps, "Iterations / CV repetitions");
    sub->add_option("--out", out, "Output directory");
    sub->add_flag("--no-plots", no_plots, "Skip SVG output");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Overrides o;
    o.seed = seed;
    o.reps = reps;
    if (out) o.out = *out;
    o.no_plots = no_plots;
    auto cfg = load_config(config);
    apply_overrides(cfg, o);
    return run_command(command, cfg, o, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace spdiag::cli
