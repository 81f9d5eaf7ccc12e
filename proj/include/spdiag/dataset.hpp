#pragma once

#include <spdiag/kdtree.hpp>
#include <spdiag/types.hpp>

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spdiag {

/// Point observations: coordinates, a numeric or categorical response,
/// named numeric features and optional group (field) membership.
///
/// Class responses are stored as integer codes 0..K-1 in the response vector;
/// `class_labels()` maps codes back to names. When the coordinates are also
/// registered as features, `x_feature()`/`y_feature()` give their columns.
///
/// Immutable once constructed; all queries are safe for concurrent use.
class Dataset {
 public:
  struct CoordinateFeatures {
    std::optional<Index> x;
    std::optional<Index> y;
  };

  Dataset(std::vector<std::string> feature_names, Coordinates coords,
          Eigen::MatrixXd features, Eigen::VectorXd response,
          ResponseKind kind, std::vector<std::string> class_labels = {},
          std::optional<std::vector<int>> groups = std::nullopt,
          CoordinateFeatures coordinate_features = {});

  Index size() const { return coords_.rows(); }
  Index num_features() const { return features_.cols(); }

  const std::vector<std::string>& feature_names() const { return names_; }
  /// Column of `name`; throws SchemaError when absent.
  Index feature_index(const std::string& name) const;
  std::optional<Index> find_feature(const std::string& name) const;

  const Coordinates& coords() const { return coords_; }
  Location location(Index i) const { return location_of(coords_, i); }

  /// n x p, one row per observation.
  const Eigen::MatrixXd& features() const { return features_; }
  std::vector<double> feature_row(Index i) const;

  const Eigen::VectorXd& response() const { return response_; }
  ResponseKind kind() const { return kind_; }
  const std::vector<std::string>& class_labels() const { return labels_; }
  int num_classes() const { return static_cast<int>(labels_.size()); }

  bool has_groups() const { return groups_.has_value(); }
  const std::vector<int>& groups() const;

  std::optional<Index> x_feature() const { return coord_features_.x; }
  std::optional<Index> y_feature() const { return coord_features_.y; }
  const CoordinateFeatures& coordinate_features() const {
    return coord_features_;
  }

  /// True when at least two observations share a location.
  bool has_duplicate_locations() const { return duplicates_; }

  const KdTree& index() const { return *tree_; }
  std::shared_ptr<const KdTree> index_ptr() const { return tree_; }

  /// Rows in the given order; schema, labels and coordinate roles are kept.
  Dataset subset(std::span<const Index> rows) const;

 private:
  std::vector<std::string> names_;
  Coordinates coords_;
  Eigen::MatrixXd features_;
  Eigen::VectorXd response_;
  ResponseKind kind_;
  std::vector<std::string> labels_;
  std::optional<std::vector<int>> groups_;
  CoordinateFeatures coord_features_;
  bool duplicates_ = false;
  std::shared_ptr<const KdTree> tree_;
};

/// Column roles for CSV ingestion.
struct CsvSchema {
  std::string x = "x";
  std::string y = "y";
  std::string response;
  ResponseKind kind = ResponseKind::regression;
  std::vector<std::string> features;
  /// Register x and y as the leading two features.
  bool coordinates_as_features = false;
  std::optional<std::string> group;
};

/// Comma-separated, header row required, '.' decimal separator.
/// Rows with empty or NA cells in any used column are rejected.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Reads an x/y table (prediction grid). Extra columns are ignored.
std::vector<Location> load_locations_csv(const std::string& path,
                                         const std::string& x = "x",
                                         const std::string& y = "y");

// ---------------------------------------------------------------------------
// Distance summaries

struct Histogram {
  std::vector<double> edges;
  std::vector<Index> counts;
};

struct HistogramSpec {
  /// Fixed bin width in meters; when unset, `n_bins` equal bins over
  /// [0, max] are used.
  std::optional<double> bin_width;
  int n_bins = 30;
};

struct DistanceSummary {
  Index count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  Histogram histogram;
};

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

DistanceSummary summarize_distances(std::span<const double> distances,
                                    const HistogramSpec& spec = {});

/// Per observation, the distance to its nearest neighbour at a distinct
/// location.
std::vector<double> nearest_neighbour_distances(const Dataset& ds);
DistanceSummary nn_distance_stats(const Dataset& ds,
                                  const HistogramSpec& spec = {});

/// Per target, the distance to the nearest training location.
std::vector<double> prediction_distances(const Dataset& train,
                                         std::span<const Location> targets);
DistanceSummary prediction_distance_distribution(
    const Dataset& train, std::span<const Location> targets,
    const HistogramSpec& spec = {});

/// Training set of a buffered leave-one-out iteration.
struct BufferSplit {
  std::vector<Index> train;
  /// Distance from the held-out location to the nearest retained one.
  double d_actual = 0.0;
};

/// Drops observation i and everything within distance <= r of it. For r < 0
/// only i itself is dropped. Throws ExhaustedBufferError if nothing remains.
BufferSplit buffer_exclude(const Dataset& ds, Index i, double r);

}  // namespace spdiag
