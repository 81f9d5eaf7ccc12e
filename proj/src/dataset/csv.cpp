#include <spdiag/dataset.hpp>
#include <spdiag/errors.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace spdiag {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      cell += c;
    } else if (c == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw SchemaError("missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  }
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("'" + path + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    t.rows.push_back(split_line(line));
  }
  return t;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

double parse_number(const std::string& cell, const std::string& column,
                    std::size_t row) {
  if (is_missing(cell)) {
    throw ParseError("missing value in column '" + column + "' at row " +
                         std::to_string(row),
                     row);
  }
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("non-numeric value '" + cell + "' in column '" + column +
                         "' at row " + std::to_string(row),
                     row);
  }
  return v;
}

const std::string& cell_at(const std::vector<std::string>& row, std::size_t c,
                           std::size_t row_number) {
  if (c >= row.size()) {
    throw ParseError("row " + std::to_string(row_number) + " has too few cells",
                     row_number);
  }
  return row[c];
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  const Table t = read_table(path);
  const std::size_t cx = t.column(schema.x);
  const std::size_t cy = t.column(schema.y);
  const std::size_t cr = t.column(schema.response);
  std::vector<std::size_t> cf;
  for (const auto& f : schema.features) cf.push_back(t.column(f));
  std::optional<std::size_t> cg;
  if (schema.group) cg = t.column(*schema.group);

  const Index n = static_cast<Index>(t.rows.size());
  if (n < 2) throw SchemaError("'" + path + "' needs at least 2 data rows");

  std::vector<std::string> names;
  Dataset::CoordinateFeatures coord_features;
  const Index offset = schema.coordinates_as_features ? 2 : 0;
  if (schema.coordinates_as_features) {
    names = {schema.x, schema.y};
    coord_features = {0, 1};
  }
  for (const auto& f : schema.features) {
    if (schema.coordinates_as_features && (f == schema.x || f == schema.y)) {
      throw SchemaError("coordinate column '" + f +
                        "' listed as a feature and registered as one");
    }
    names.push_back(f);
  }

  Coordinates coords(n, 2);
  Eigen::MatrixXd features(n, static_cast<Index>(names.size()));
  Eigen::VectorXd response(n);
  std::vector<std::string> labels;
  std::map<std::string, int> label_codes;
  std::vector<std::string> raw_labels;
  std::optional<std::vector<int>> groups;
  if (cg) groups.emplace();

  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    const std::size_t rn = static_cast<std::size_t>(i) + 1;
    coords(i, 0) = parse_number(cell_at(row, cx, rn), schema.x, rn);
    coords(i, 1) = parse_number(cell_at(row, cy, rn), schema.y, rn);
    if (schema.coordinates_as_features) {
      features(i, 0) = coords(i, 0);
      features(i, 1) = coords(i, 1);
    }
    for (std::size_t j = 0; j < cf.size(); ++j) {
      features(i, offset + static_cast<Index>(j)) =
          parse_number(cell_at(row, cf[j], rn), schema.features[j], rn);
    }
    if (schema.kind == ResponseKind::regression) {
      response[i] = parse_number(cell_at(row, cr, rn), schema.response, rn);
    } else {
      const std::string& label = cell_at(row, cr, rn);
      if (is_missing(label)) {
        throw ParseError("missing class label at row " + std::to_string(rn),
                         rn);
      }
      raw_labels.push_back(label);
      label_codes.emplace(label, 0);
    }
    if (cg) {
      const double g = parse_number(cell_at(row, *cg, rn), *schema.group, rn);
      if (g != std::floor(g)) {
        throw ParseError("non-integer group id at row " + std::to_string(rn),
                         rn);
      }
      groups->push_back(static_cast<int>(g));
    }
  }

  if (schema.kind == ResponseKind::classification) {
    if (label_codes.size() < 2) {
      throw SchemaError("classification response needs at least 2 classes");
    }
    int code = 0;
    for (auto& [label, c] : label_codes) {
      c = code++;
      labels.push_back(label);
    }
    for (Index i = 0; i < n; ++i) response[i] = label_codes.at(raw_labels[i]);
  }

  return Dataset(std::move(names), std::move(coords), std::move(features),
                 std::move(response), schema.kind, std::move(labels),
                 std::move(groups), coord_features);
}

std::vector<Location> load_locations_csv(const std::string& path,
                                         const std::string& x,
                                         const std::string& y) {
  const Table t = read_table(path);
  const std::size_t cx = t.column(x);
  const std::size_t cy = t.column(y);
  std::vector<Location> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::size_t rn = i + 1;
    out.push_back({parse_number(cell_at(t.rows[i], cx, rn), x, rn),
                   parse_number(cell_at(t.rows[i], cy, rn), y, rn)});
  }
  if (out.empty()) throw SchemaError("'" + path + "' has no locations");
  return out;
}

}  // namespace spdiag
