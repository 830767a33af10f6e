#include "cvqml/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cvqml {

namespace {
void check_same_grid(const std::vector<double>& a, const std::vector<double>& b,
                     double step_a, double step_b) {
  if (a.size() != b.size())
    throw std::invalid_argument("distribution grids differ in size");
  if (std::abs(step_a - step_b) > 1e-12 * (1.0 + std::abs(step_a)))
    throw std::invalid_argument("distribution grids differ in step");
  if (!a.empty() &&
      (std::abs(a.front() - b.front()) > 1e-9 || std::abs(a.back() - b.back()) > 1e-9))
    throw std::invalid_argument("distribution grids differ in range");
}
}  // namespace

void Distribution1D::to_csv(const std::string& path, const std::string& ycol) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "x," << ycol << "\n";
  char buf[80];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid[i], density[i]);
    out << buf;
  }
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo))
    throw std::invalid_argument("uniform_grid needs hi > lo and at least 2 points");
  std::vector<double> g(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + step * static_cast<double>(i);
  return g;
}

double total_variation(const Distribution1D& a, const Distribution1D& b) {
  check_same_grid(a.grid, b.grid, a.step, b.step);
  double s = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i)
    s += std::abs(a.density[i] - b.density[i]);
  return 0.5 * s * a.step;
}

double total_variation(const Distribution2D& a, const Distribution2D& b) {
  check_same_grid(a.grid_x, b.grid_x, a.step_x, b.step_x);
  check_same_grid(a.grid_y, b.grid_y, a.step_y, b.step_y);
  double s = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i)
    s += std::abs(a.density[i] - b.density[i]);
  return 0.5 * s * a.step_x * a.step_y;
}

Distribution1D histogram(const std::vector<double>& samples,
                         const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("histogram needs a real grid");
  if (samples.empty()) throw std::invalid_argument("histogram needs samples");
  Distribution1D d;
  d.grid = grid;
  d.step = grid[1] - grid[0];
  d.density.assign(grid.size(), 0.0);
  const double lo_edge = grid.front() - 0.5 * d.step;
  for (double s : samples) {
    auto idx = static_cast<long>(std::floor((s - lo_edge) / d.step));
    idx = std::max<long>(0, std::min<long>(static_cast<long>(grid.size()) - 1, idx));
    d.density[static_cast<std::size_t>(idx)] += 1.0;
  }
  const double w = 1.0 / (static_cast<double>(samples.size()) * d.step);
  for (double& v : d.density) v *= w;
  return d;
}

double ks_statistic(std::vector<double> samples, const Distribution1D& model) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  // Model CDF at cell upper edges.
  std::vector<double> cdf(model.grid.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < model.grid.size(); ++i) {
    acc += model.density[i] * model.step;
    cdf[i] = acc;
  }
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  const double lo_edge = model.grid.front() - 0.5 * model.step;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto idx = static_cast<long>(std::floor((samples[k] - lo_edge) / model.step));
    double m;
    if (idx < 0)
      m = 0.0;
    else if (idx >= static_cast<long>(cdf.size()))
      m = 1.0;
    else
      m = cdf[static_cast<std::size_t>(idx)];
    worst = std::max(worst, std::abs(static_cast<double>(k) / n - m));
    worst = std::max(worst, std::abs(static_cast<double>(k + 1) / n - m));
  }
  return worst;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line needs at least two (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-30)
    throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog needs strictly positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace cvqml
