#pragma once
// Discretized probability densities over uniform quadrature grids. Shared by
// the measurement pipeline and the closed-form reference curves; deliberately
// free of any state-machinery dependency.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqml {

struct Distribution1D {
  std::vector<double> grid;     // ascending, uniformly spaced cell centers
  std::vector<double> density;  // nonnegative
  double step = 0.0;

  double total_mass() const {
    double m = 0.0;
    for (double d : density) m += d;
    return m * step;
  }
  void normalize() {
    const double m = total_mass();
    if (m <= 0.0) throw std::runtime_error("cannot normalize zero-mass density");
    for (double& d : density) d /= m;
  }
  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m += grid[i] * density[i];
    return m * step;
  }
  double variance() const {
    const double mu = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      v += (grid[i] - mu) * (grid[i] - mu) * density[i];
    return v * step;
  }
  // Probability mass on cells with center > 0 minus mass on center < 0.
  double signed_half_difference() const {
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] > 0)
        pos += density[i];
      else if (grid[i] < 0)
        neg += density[i];
    }
    return (pos - neg) * step;
  }
  void to_csv(const std::string& path, const std::string& ycol = "density") const;
};

struct Distribution2D {
  std::vector<double> grid_x;   // cell centers, uniform
  std::vector<double> grid_y;
  std::vector<double> density;  // row-major: density[ix * grid_y.size() + iy]
  double step_x = 0.0, step_y = 0.0;

  double total_mass() const {
    double m = 0.0;
    for (double d : density) m += d;
    return m * step_x * step_y;
  }
  void normalize() {
    const double m = total_mass();
    if (m <= 0.0) throw std::runtime_error("cannot normalize zero-mass density");
    for (double& d : density) d /= m;
  }
};

// Uniform grid of `points` cell centers spanning [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

// Total-variation distance ½∫|p − q|; grids must match.
double total_variation(const Distribution1D& a, const Distribution1D& b);
double total_variation(const Distribution2D& a, const Distribution2D& b);

// Bin samples onto an existing uniform grid (cells centered on grid points;
// samples outside the outermost cell edges are clipped into the end cells).
Distribution1D histogram(const std::vector<double>& samples,
                         const std::vector<double>& grid);

// Kolmogorov–Smirnov statistic of samples against a gridded model density:
// sup_x |empirical CDF − model CDF| with the model CDF accumulated cell-wise.
double ks_statistic(std::vector<double> samples, const Distribution1D& model);

// Least-squares line fit of y against x; returns {slope, intercept}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cvqml
