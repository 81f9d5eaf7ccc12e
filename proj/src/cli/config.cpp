#include <spdiag/cli.hpp>
#include <spdiag/errors.hpp>

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace spdiag::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json scalar_to_json(const YAML::Node& n) {
  const std::string& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "null" || s == "~" || s.empty()) return nullptr;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  std::int64_t i = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), i);
  if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return i;
  double d = 0.0;
  r = std::from_chars(s.data(), s.data() + s.size(), d);
  if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return d;
  return s;
}

json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) {
        o[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      }
      return o;
    }
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& v : n) a.push_back(yaml_to_json(v));
      return a;
    }
    case YAML::NodeType::Scalar:
      return scalar_to_json(n);
    default:
      return nullptr;
  }
}

/// A config mapping whose keys must all be consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be a mapping");
  }

  bool has(const std::string& key) const {
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), key);
  }

  template <class T>
  std::optional<T> opt(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    return convert<T>(j_.at(key), key);
  }

  template <class T>
  T need(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(path_ + "." + key + " is required");
    return convert<T>(j_.at(key), key);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& kv : j_.items()) {
      if (!used_.count(kv.key())) {
        throw ConfigError("unknown key " + path_ + "." + kv.key());
      }
    }
  }

 private:
  template <class T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number() || v.is_boolean()) return v.dump();
        throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (v.is_string()) return {v.get<std::string>()};
        std::vector<std::string> out;
        for (const auto& e : v) {
          if (!e.is_string()) throw ConfigError("");
          out.push_back(e.get<std::string>());
        }
        return out;
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
        return v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.get<std::int64_t>() < 0) throw ConfigError("");
        }
        return v.get<T>();
      } else {
        if (!v.is_number()) throw ConfigError("");
        return v.get<T>();
      }
    } catch (const std::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

ResponseKind parse_kind(const std::string& s) {
  if (s == "regression") return ResponseKind::regression;
  if (s == "classification") return ResponseKind::classification;
  throw ConfigError("dataset.kind must be regression or classification");
}

FieldSynthConfig parse_synthetic(Section s) {
  FieldSynthConfig c;
  c.n_fields = s.get("n_fields", c.n_fields);
  c.n_classes = s.get("n_classes", c.n_classes);
  c.cells_per_side = s.get("cells_per_side", c.cells_per_side);
  c.cell_size = s.get("cell_size", c.cell_size);
  c.min_gap = s.get("min_gap", c.min_gap);
  c.extent = s.get("extent", c.extent);
  if (s.has("block_sizes")) {
    c.block_sizes.clear();
    for (const auto& v : s.raw("block_sizes")) {
      if (!v.is_number_integer()) {
        throw ConfigError("synthetic.block_sizes must be integers");
      }
      c.block_sizes.push_back(v.get<int>());
    }
  }
  c.block_correlation = s.get("block_correlation", c.block_correlation);
  c.class_separation = s.get("class_separation", c.class_separation);
  c.field_effect = s.get("field_effect", c.field_effect);
  c.seed = s.get<std::uint64_t>("seed", c.seed);
  s.finish();
  return c;
}

ModelSpec parse_model(Section s) {
  ModelSpec m;
  m.kind = parse_model_kind(s.need<std::string>("kind"));
  m.name = s.get<std::string>("name", "");
  m.features = s.get<std::vector<std::string>>("features", {});
  m.forest.n_trees = s.get("trees", m.forest.n_trees);
  m.forest.mtry = s.opt<int>("mtry");
  m.forest.min_node_size = s.opt<int>("min_node_size");
  m.forest.bootstrap = s.get("bootstrap", m.forest.bootstrap);
  m.gwr.n_bandwidths = s.get("n_bandwidths", m.gwr.n_bandwidths);
  m.gwr.bandwidth = s.opt<double>("bandwidth");
  m.gwr.bandwidth_min = s.opt<double>("bandwidth_min");
  m.gwr.bandwidth_max = s.opt<double>("bandwidth_max");
  m.blend_distance = s.get("blend_distance", m.blend_distance);
  m.switch_distance = s.get("switch_distance", m.switch_distance);
  if (s.has("lags")) {
    Section l(s.raw("lags"), s.where("lags"));
    LagLayout layout;
    layout.max_lag = l.need<double>("max_lag");
    layout.n_lags = l.get("n_lags", layout.n_lags);
    l.finish();
    m.lags = layout;
  }
  s.finish();
  if (m.forest.n_trees < 1) throw ConfigError("trees must be at least 1");
  if (!(m.blend_distance > 0)) throw ConfigError("blend_distance must be > 0");
  return m;
}

CvScheme parse_cv(Section s, std::uint64_t seed) {
  CvScheme c;
  c.kind = parse_cv_kind(s.need<std::string>("kind"));
  c.k = s.get("k", c.k);
  c.repetitions = s.get("repetitions", c.repetitions);
  c.seed = s.get<std::uint64_t>("seed", seed);
  c.by_group = s.get("by_group", c.by_group);
  s.finish();
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const fs::path& base) {
  json root;
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') {
      root = json::parse(text);
    } else {
      root = yaml_to_json(YAML::Load(text));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a mapping");

  ExperimentConfig cfg;
  cfg.text = text;
  Section top(root, "config");
  cfg.seed = top.get<std::uint64_t>("seed", cfg.seed);

  {
    Section d(top.raw("dataset"), "dataset");
    if (d.has("synthetic")) {
      cfg.synthetic = parse_synthetic(Section(d.raw("synthetic"),
                                              "dataset.synthetic"));
    } else {
      cfg.dataset_path = resolve(base, d.need<std::string>("path"));
      cfg.schema.x = d.get<std::string>("x", "x");
      cfg.schema.y = d.get<std::string>("y", "y");
      cfg.schema.response = d.need<std::string>("response");
      cfg.schema.kind = parse_kind(d.get<std::string>("kind", "regression"));
      cfg.schema.features = d.get<std::vector<std::string>>("features", {});
      cfg.schema.coordinates_as_features =
          d.get("coordinates_as_features", false);
      cfg.schema.group = d.opt<std::string>("group");
    }
    d.finish();
  }

  if (top.has("grid")) {
    Section g(top.raw("grid"), "grid");
    cfg.grid_path = resolve(base, g.need<std::string>("path"));
    cfg.grid_x = g.get<std::string>("x", "x");
    cfg.grid_y = g.get<std::string>("y", "y");
    g.finish();
  }

  if (!top.has("models")) throw ConfigError("config.models is required");
  const auto& models = top.raw("models");
  if (!models.is_array() || models.empty()) {
    throw ConfigError("config.models must be a non-empty list");
  }
  std::set<std::string> labels;
  for (std::size_t k = 0; k < models.size(); ++k) {
    cfg.models.push_back(
        parse_model(Section(models[k], "models[" + std::to_string(k) + "]")));
    if (!labels.insert(cfg.models.back().label()).second) {
      throw ConfigError("duplicate model name '" + cfg.models.back().label() +
                        "'");
    }
  }

  auto& dc = cfg.diagnostics;
  dc.seed = cfg.seed;
  if (top.has("diagnostics")) {
    Section s(top.raw("diagnostics"), "diagnostics");
    dc.r_min = s.get("r_min", dc.r_min);
    dc.r_max = s.get("r_max", dc.r_max);
    dc.n_reps = s.get("n_reps", dc.n_reps);
    dc.n_bins = s.get("n_bins", dc.n_bins);
    dc.n_perm = s.get("n_perm", dc.n_perm);
    dc.min_bin_records = s.get("min_bin_records", dc.min_bin_records);
    dc.smoothing_window = s.get("smoothing_window", dc.smoothing_window);
    if (s.has("measure")) {
      dc.measure = parse_error_measure(s.get<std::string>("measure", ""));
    }
    s.finish();
  }
  if (!top.has("diagnostics") || !root["diagnostics"].contains("measure")) {
    dc.measure = cfg.schema.kind == ResponseKind::classification ||
                         cfg.synthetic
                     ? ErrorMeasure::misclassification
                     : ErrorMeasure::rmse;
  }
  dc.validate();

  if (top.has("importance")) {
    Section s(top.raw("importance"), "importance");
    cfg.importance.features = s.get<std::vector<std::string>>("features", {});
    cfg.importance.components = s.get("components", cfg.importance.components);
    if (s.has("groups")) {
      const auto& groups = s.raw("groups");
      if (!groups.is_array()) throw ConfigError("importance.groups: list");
      for (std::size_t k = 0; k < groups.size(); ++k) {
        Section g(groups[k], "importance.groups[" + std::to_string(k) + "]");
        GroupDefinition def;
        def.name = g.need<std::string>("name");
        def.members = g.need<std::vector<std::string>>("members");
        g.finish();
        cfg.importance.groups.push_back(std::move(def));
      }
    }
    s.finish();
    if (cfg.importance.components < 1) {
      throw ConfigError("importance.components must be at least 1");
    }
  }

  if (top.has("cv")) {
    const auto& cv = top.raw("cv");
    if (!cv.is_array()) throw ConfigError("config.cv must be a list");
    for (std::size_t k = 0; k < cv.size(); ++k) {
      cfg.cv.push_back(
          parse_cv(Section(cv[k], "cv[" + std::to_string(k) + "]"), cfg.seed));
    }
  }

  if (top.has("histogram")) {
    Section s(top.raw("histogram"), "histogram");
    cfg.histogram.bin_width = s.opt<double>("bin_width");
    cfg.histogram.n_bins = s.get("n_bins", cfg.histogram.n_bins);
    s.finish();
    if (cfg.histogram.bin_width && !(*cfg.histogram.bin_width > 0)) {
      throw ConfigError("histogram.bin_width must be positive");
    }
    if (cfg.histogram.n_bins < 1) throw ConfigError("histogram.n_bins >= 1");
  }

  if (top.has("plots")) {
    Section s(top.raw("plots"), "plots");
    cfg.plots.enabled = s.get("enabled", cfg.plots.enabled);
    cfg.plots.sqrt_axis = s.get("sqrt_axis", cfg.plots.sqrt_axis);
    s.finish();
  }

  if (top.has("output")) {
    cfg.output_dir = resolve(base, top.get<std::string>("output", ""));
  } else {
    cfg.output_dir = base / "spdiag_out";
  }
  top.finish();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.diagnostics.seed = *o.seed;
    for (auto& c : cfg.cv) c.seed = *o.seed;
  }
  if (o.reps) {
    if (*o.reps < 1) throw ConfigError("--reps must be at least 1");
    cfg.diagnostics.n_reps = *o.reps;
    for (auto& c : cfg.cv) c.repetitions = *o.reps;
  }
  if (o.out) cfg.output_dir = *o.out;
  if (o.no_plots) cfg.plots.enabled = false;
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.synthetic) return synth_fields(*cfg.synthetic);
  if (!fs::exists(cfg.dataset_path)) {
    throw ConfigError("dataset file " + cfg.dataset_path.string() +
                      " does not exist");
  }
  return load_csv(cfg.dataset_path.string(), cfg.schema);
}

void validate_experiment(const ExperimentConfig& cfg, const Dataset& ds) {
  for (const auto& m : cfg.models) {
    const bool classifier =
        m.kind == ModelKind::lda || m.kind == ModelKind::nn_lda;
    const bool regression_only =
        m.kind != ModelKind::nn && m.kind != ModelKind::rf && !classifier;
    if (classifier && ds.kind() != ResponseKind::classification) {
      throw ConfigError(m.label() + " needs a classification response");
    }
    if (regression_only && ds.kind() != ResponseKind::regression) {
      throw ConfigError(m.label() + " needs a numeric response");
    }
    resolve_features(m, ds);
  }
  if (cfg.diagnostics.measure == ErrorMeasure::misclassification &&
      ds.kind() != ResponseKind::classification) {
    throw ConfigError("misclassification needs a classification response");
  }
  for (const auto& f : cfg.importance.features) ds.feature_index(f);
  for (const auto& g : cfg.importance.groups) {
    for (const auto& f : g.members) ds.feature_index(f);
  }
  for (const auto& c : cfg.cv) c.validate(ds);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spdiag::cli
