#pragma once

#include <spdiag/dataset.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spdiag::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Palette slot; -1 takes the position in the panel.
  int colour = -1;
};

/// A labelled point estimate, e.g. a CV error at its mean prediction distance.
struct Marker {
  std::string label;
  double x = 0.0;
  double y = 0.0;
  /// Palette slot; -1 for black.
  int colour = -1;
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  /// Square-root transformed x axis; tick labels stay in data units.
  bool sqrt_x = false;
  bool zero_line = false;
  std::vector<Series> series;
  std::vector<Marker> markers;
  std::optional<Histogram> histogram;
};

/// Grid of panels with a shared legend built from the series names.
std::string render(std::span<const Panel> panels, int columns,
                   const std::string& title);

}  // namespace spdiag::svg
