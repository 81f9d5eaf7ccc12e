#pragma once

#include <spdiag/dataset.hpp>

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace spdiag::test {

inline std::string data_path(const std::string& name) {
  return std::string(SPDIAG_DATA_DIR) + "/" + name;
}

/// logZn with x, y, sqrt.dist, elev as features.
inline Dataset meuse() {
  CsvSchema s;
  s.response = "logZn";
  s.features = {"sqrt.dist", "elev"};
  s.coordinates_as_features = true;
  return load_csv(data_path("meuse.csv"), s);
}

inline std::vector<Location> meuse_grid() {
  return load_locations_csv(data_path("meuse_grid.csv"));
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("spdiag_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path write(const std::string& name,
                              const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

// ---------------------------------------------------------------------------
// Oracles. Deliberately naive: O(n^2) loops and textbook elimination, no
// shared code with the library.

inline double brute_nearest(const Coordinates& pts, double x, double y,
                            Index skip = -1) {
  double best = INFINITY;
  for (Index j = 0; j < pts.rows(); ++j) {
    if (j == skip) continue;
    best = std::min(best, std::hypot(pts(j, 0) - x, pts(j, 1) - y));
  }
  return best;
}

/// Gaussian elimination with partial pivoting on a dense system.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues (unsorted) and eigenvectors as columns.
inline void jacobi_eigen(std::vector<std::vector<double>> a,
                         std::vector<double>& values,
                         std::vector<std::vector<double>>& vectors) {
  const std::size_t n = a.size();
  vectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vectors[k][p], vkq = vectors[k][q];
          vectors[k][p] = c * vkp - s * vkq;
          vectors[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

/// Small regression fixture: response = 2 + 0.01 x - 0.02 y + noise.
inline Dataset linear_fixture(Index n, std::uint64_t seed,
                              double noise = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::normal_distribution<double> e(0.0, noise);
  Coordinates c(n, 2);
  Eigen::MatrixXd f(n, 3);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    c(i, 0) = u(rng);
    c(i, 1) = u(rng);
    f(i, 0) = c(i, 0);
    f(i, 1) = c(i, 1);
    f(i, 2) = u(rng) / 100.0;  // unrelated to the response
    y[i] = 2.0 + 0.01 * c(i, 0) - 0.02 * c(i, 1) + e(rng);
  }
  return Dataset({"x", "y", "noise"}, c, f, y, ResponseKind::regression, {},
                 std::nullopt, {0, 1});
}

}  // namespace spdiag::test
