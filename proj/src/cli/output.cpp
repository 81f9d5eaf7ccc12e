#include <spdiag/cli.hpp>
#include <spdiag/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spdiag::cli {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json numbers(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

json to_json(const DistanceSummary& s) {
  json counts = json::array();
  for (Index c : s.histogram.counts) counts.push_back(c);
  return {{"count", s.count},
          {"mean", number(s.mean)},
          {"min", number(s.min)},
          {"q1", number(s.q1)},
          {"median", number(s.median)},
          {"q3", number(s.q3)},
          {"max", number(s.max)},
          {"histogram",
           {{"edges", numbers(s.histogram.edges)}, {"counts", counts}}}};
}

json to_json(const Profile& p) {
  json points = json::array();
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const auto& pt = p.points[k];
    points.push_back({{"bin", pt.bin},
                      {"d_hat", number(pt.d_hat)},
                      {"raw", number(pt.value)},
                      {"smoothed", number(p.smoothed[k])},
                      {"n_records", pt.n_records},
                      {"mean_train_size", number(pt.mean_train_size)}});
  }
  return {{"measure", p.measure}, {"points", points}};
}

json to_json(const CvResult& r) {
  return {{"estimator", to_string(r.scheme.kind)},
          {"model", r.model},
          {"k", r.scheme.k},
          {"repetitions", r.per_repetition.size()},
          {"seed", r.scheme.seed},
          {"by_group", r.scheme.by_group},
          {"estimate", number(r.estimate)},
          {"per_repetition", numbers(r.per_repetition)},
          {"mean_distance", number(r.mean_distance)},
          {"redraws", r.redraws},
          {"distance_summary", to_json(r.distance_summary)}};
}

json to_json(const Svip& s) {
  json channels = json::object();
  for (const auto& [name, prof] : s.channels) {
    json points = json::array();
    for (std::size_t k = 0; k < prof.points.size(); ++k) {
      const auto& pt = prof.points[k];
      points.push_back({{"bin", pt.bin},
                        {"d_hat", number(pt.d_hat)},
                        {"importance_raw", number(pt.importance)},
                        {"importance_smoothed", number(prof.smoothed[k])},
                        {"standard_error", number(pt.standard_error)},
                        {"n_records", pt.n_records}});
    }
    channels[name] = points;
  }
  return {{"clean", to_json(s.clean)}, {"channels", channels}};
}

std::string profile_csv(const Profile& p) {
  std::ostringstream out;
  out << "d_hat,raw,smoothed,n_records,mean_train_size\n";
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const auto& pt = p.points[k];
    out << format_double(pt.d_hat) << ',' << format_double(pt.value) << ','
        << format_double(p.smoothed[k]) << ',' << pt.n_records << ','
        << format_double(pt.mean_train_size) << '\n';
  }
  return out.str();
}

std::string records_csv(const LooRun& run) {
  std::ostringstream out;
  out << "iteration,target,r,d,train_size,y,channel,replicate,prediction\n";
  for (const auto& r : run.records) {
    const std::string head = std::to_string(r.iteration) + ',' +
                             std::to_string(r.target) + ',' +
                             format_double(r.r) + ',' + format_double(r.d) +
                             ',' + std::to_string(r.train_size) + ',' +
                             format_double(r.y) + ',';
    out << head << "none,0," << format_double(r.y_hat) << '\n';
    for (std::size_t c = 0; c < r.permuted.size(); ++c) {
      for (std::size_t j = 0; j < r.permuted[c].size(); ++j) {
        out << head << quote(run.channels[c]) << ',' << j + 1 << ','
            << format_double(r.permuted[c][j]) << '\n';
      }
    }
  }
  return out.str();
}

std::string svip_csv(const Svip& s) {
  std::ostringstream out;
  out << "feature_or_group,d_hat,importance_raw,importance_smoothed,"
         "n_records\n";
  for (const auto& [name, prof] : s.channels) {
    for (std::size_t k = 0; k < prof.points.size(); ++k) {
      const auto& pt = prof.points[k];
      out << quote(name) << ',' << format_double(pt.d_hat) << ','
          << format_double(pt.importance) << ','
          << format_double(prof.smoothed[k]) << ',' << pt.n_records << '\n';
    }
  }
  return out.str();
}

std::string distances_csv(std::span<const double> d) {
  std::ostringstream out;
  out << "distance\n";
  for (double v : d) out << format_double(v) << '\n';
  return out.str();
}

std::string histogram_csv(const DistanceSummary& s) {
  std::ostringstream out;
  out << "lower,upper,count\n";
  const auto& h = s.histogram;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1])
        << ',' << h.counts[k] << '\n';
  }
  return out.str();
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + dir.string() + ": " +
                      ec.message());
  }
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
}

}  // namespace spdiag::cli
