#include "cvqml/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvqml::oracle {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrtPi = 0.5641895835477562869;  // 1/√π
}  // namespace

// ---------------------------------------------------------------------------
// Dawson / sign difference
// ---------------------------------------------------------------------------

double dawson(double x) {
  const double ax = std::abs(x);
  if (ax < 0.2) {
    // Maclaurin series F(x) = x·Σ_k (−2x²)^k / (2k+1)!!, |term| < 1e−18 exit.
    const double x2 = x * x;
    double term = x, sum = x;
    for (int k = 1; k < 40; ++k) {
      term *= -2.0 * x2 / static_cast<double>(2 * k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // Rybicki's sampling expansion with h = 0.2: relative error ~e^{−(π/2h)²}.
  constexpr double h = 0.2;
  constexpr int kTerms = 20;  // covers offsets up to (2·20−1)h = 7.8
  static const auto coeff = [] {
    std::array<double, kTerms> a{};
    for (int i = 0; i < kTerms; ++i) {
      const double d = (2.0 * i + 1.0) * h;
      a[static_cast<std::size_t>(i)] = std::exp(-d * d);
    }
    return a;
  }();
  const int n0 = 2 * static_cast<int>(0.5 * ax / h + 0.5);
  const double xp = ax - static_cast<double>(n0) * h;
  const double e1_step = std::exp(2.0 * xp * h);
  const double e2 = e1_step * e1_step;
  double e1 = e1_step;
  double d1 = static_cast<double>(n0) + 1.0;
  double d2 = d1 - 2.0;
  double sum = 0.0;
  for (int i = 0; i < kTerms; ++i, d1 += 2.0, d2 -= 2.0, e1 *= e2)
    sum += coeff[static_cast<std::size_t>(i)] * (e1 / d1 + 1.0 / (d2 * e1));
  const double ans = kInvSqrtPi * std::exp(-xp * xp) * sum;
  return x >= 0.0 ? ans : -ans;
}

double sign_difference(double beta) {
  if (beta < 0.0)
    throw std::domain_error("sign_difference requires beta >= 0");
  if (beta > 12.0)
    throw std::domain_error(
        "sign_difference: beta exceeds the accuracy-validated range [0, 12]");
  // e^{−β²/2}·erfi(β/√2) = (2/√π)·F(β/√2): the Gaussian damping cancels the
  // e^{x²} growth of erfi analytically, so nothing here can overflow.
  return 2.0 * kInvSqrtPi * dawson(beta / std::sqrt(2.0));
}

// ---------------------------------------------------------------------------
// Inversion joint amplitude
// ---------------------------------------------------------------------------

cxd amplitude_Ai(double qR, double qtR, double gamma, double lambda, double s) {
  if (!(s > 0.0)) throw std::domain_error("amplitude_Ai requires s > 0");
  if (lambda == 0.0)
    throw std::domain_error("amplitude_Ai: lambda = 0 makes the prefactor singular");
  const double gls = gamma * lambda * s;
  const double denom = 2.0 * (1.0 + gls * gls);
  const cxd expo(-s * (qR * qR + qtR * qtR) / denom,
                 -2.0 * s * s * gamma * lambda * qR * qtR / denom);
  const double pref = 1.0 / (lambda * std::sqrt(1.0 + 1.0 / (gls * gls)));
  return pref * std::exp(expo);
}

namespace {
void check_weights(const std::vector<double>& weights,
                   const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("empty eigenvalue spectrum");
  if (weights.size() != lambdas.size())
    throw std::invalid_argument("weights and eigenvalues differ in length");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative mixture weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw std::invalid_argument("mixture weights must sum to 1 within 1e-8");
}

void finalize_on_grid_1d(Distribution1D& d) {
  const double mass = d.total_mass();
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument(
        "grid does not cover the distribution (mass deficit above 1e-8); widen it");
  d.normalize();
}
}  // namespace

Distribution2D inversion_joint_curve(const std::vector<double>& grid,
                                     const std::vector<double>& weights,
                                     const std::vector<double>& lambdas,
                                     double gamma, double s) {
  check_weights(weights, lambdas);
  if (grid.size() < 2) throw std::invalid_argument("degenerate grid");
  Distribution2D d;
  d.grid_x = grid;
  d.grid_y = grid;
  d.step_x = d.step_y = grid[1] - grid[0];
  const std::size_t n = grid.size();
  d.density.assign(n * n, 0.0);
  // ∫∫|A_i|² dq dq̃ = π·γ²·s for every i, so the normalized mixture carries
  // the weights verbatim.
  const double norm = kPi * gamma * gamma * s;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double gls = gamma * lambdas[k] * s;
    if (lambdas[k] == 0.0)
      throw std::domain_error("inversion_joint_curve: zero eigenvalue");
    const double pref_sq =
        1.0 / (lambdas[k] * lambdas[k] * (1.0 + 1.0 / (gls * gls)));
    const double w = weights[k] * pref_sq / norm;
    const double width = s / (1.0 + gls * gls);  // |A|² ∝ e^{−width·(q²+q̃²)}
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double gx = std::exp(-width * grid[ix] * grid[ix]);
      for (std::size_t iy = 0; iy < n; ++iy)
        d.density[ix * n + iy] +=
            w * gx * std::exp(-width * grid[iy] * grid[iy]);
    }
  }
  const double mass = d.total_mass();
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument(
        "grid does not cover the joint density (mass deficit above 1e-8); widen it");
  d.normalize();
  return d;
}

// ---------------------------------------------------------------------------
// Eigen peak mixture
// ---------------------------------------------------------------------------

Distribution1D peak_mixture(const std::vector<double>& grid,
                            const std::vector<double>& weights,
                            const std::vector<double>& lambdas,
                            double gamma, double s) {
  check_weights(weights, lambdas);
  if (!(s > 0.0)) throw std::domain_error("peak_mixture requires s > 0");
  if (grid.size() < 2) throw std::invalid_argument("degenerate grid");
  Distribution1D d;
  d.grid = grid;
  d.step = grid[1] - grid[0];
  d.density.assign(grid.size(), 0.0);
  const double peak_norm = std::sqrt(s / kPi);  // ∫e^{−s(·)²} = √(π/s)
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double c = gamma * lambdas[k];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double dq = grid[i] - c;
      d.density[i] += weights[k] * peak_norm * std::exp(-s * dq * dq);
    }
  }
  finalize_on_grid_1d(d);
  return d;
}

// ---------------------------------------------------------------------------
// Distance homodyne curve
// ---------------------------------------------------------------------------

Distribution1D pdist_curve(const std::vector<double>& grid, double beta,
                           double ratio) {
  if (ratio < 0.0 || ratio > 1.0)
    throw std::domain_error(
        "pdist_curve: cross-term weight outside [0, 1] yields a negative density");
  if (grid.size() < 2) throw std::invalid_argument("degenerate grid");
  Distribution1D d;
  d.grid = grid;
  d.step = grid[1] - grid[0];
  d.density.resize(grid.size());
  // e^{−p²} has variance ½ — exactly the vacuum p-variance in this
  // convention, so the curve needs no rescaling.
  const double norm = 2.0 * std::sqrt(kPi);
  const double sq2b = std::sqrt(2.0) * beta;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = grid[i];
    d.density[i] =
        std::exp(-p * p) * (2.0 - 2.0 * std::sin(sq2b * p) * ratio) / norm;
  }
  finalize_on_grid_1d(d);
  return d;
}

// ---------------------------------------------------------------------------
// Success-rate exponent
// ---------------------------------------------------------------------------

double product_window_mass(double abar) {
  if (abar < 0.0) throw std::domain_error("window size must be nonnegative");
  if (abar == 0.0) return 0.0;
  // M = 2∫₀^∞ φ(u)·erf(ā/(u√2)) du on a log abscissa (u = e^v): the
  // integrand decays like e^v toward −∞ and like the Gaussian toward +∞.
  const double v_lo = std::min(std::log(abar), 0.0) - 30.0;
  const double v_hi = std::log(8.0);
  const std::size_t panels = 8000;  // composite Simpson (even count)
  const double h = (v_hi - v_lo) / static_cast<double>(panels);
  auto f = [abar](double v) {
    const double u = std::exp(v);
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi) *
           std::erf(abar / (u * std::sqrt(2.0))) * u;
  };
  double sum = f(v_lo) + f(v_hi);
  for (std::size_t i = 1; i < panels; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(v_lo + h * static_cast<double>(i));
  return 2.0 * sum * h / 3.0;
}

double square_window_mass(double abar) {
  if (abar < 0.0) throw std::domain_error("window size must be nonnegative");
  const double e = std::erf(std::sqrt(abar / 2.0));
  return e * e;
}

ExponentScan success_rate_exponent(double s_ref, double gamma,
                                   const std::vector<double>& lambdas,
                                   std::vector<double> epsilons) {
  if (!(s_ref > 0.0) || !(gamma > 0.0))
    throw std::domain_error("success_rate_exponent requires s > 0 and gamma > 0");
  if (lambdas.empty()) throw std::invalid_argument("empty eigenvalue spectrum");
  for (double l : lambdas)
    if (l == 0.0) throw std::domain_error("zero eigenvalue in spectrum");
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  if (epsilons.size() < 2 || !(epsilons.front() > 0.0))
    throw std::invalid_argument("degenerate epsilon grid");

  ExponentScan scan;
  scan.epsilons = epsilons;
  const double eps_ref = epsilons.back();
  for (double eps : epsilons) {
    // Regime γ|λ|s ∼ 1/√ε enforced per point: s(ε)·√ε is grid-constant.
    const double s = s_ref * std::sqrt(eps_ref / eps);
    scan.s_schedule.push_back(s);
    double mp = 0.0, ms = 0.0;
    for (double lam : lambdas) {
      const double al = std::abs(lam);
      const double sigma2 = (1.0 + gamma * gamma * al * al * s * s) / (2.0 * s);
      const double abar = eps * gamma * al / sigma2;
      mp += product_window_mass(abar);
      ms += square_window_mass(abar);
    }
    const double L = static_cast<double>(lambdas.size());
    scan.mass_product.push_back(mp / L);
    scan.mass_square.push_back(ms / L);
  }
  scan.slope_product = fit_loglog(scan.epsilons, scan.mass_product).slope;
  scan.slope_square = fit_loglog(scan.epsilons, scan.mass_square).slope;
  return scan;
}

// ---------------------------------------------------------------------------
// Scalar utilities
// ---------------------------------------------------------------------------

double coherent_overlap(cxd alpha) { return std::exp(-2.0 * std::norm(alpha)); }

double poisson_tail(double nbar, std::size_t dim) {
  if (nbar < 0.0) throw std::domain_error("poisson_tail requires nbar >= 0");
  if (nbar == 0.0) return 0.0;
  double term = std::exp(-nbar), sum = term;
  for (std::size_t n = 1; n < dim; ++n) {
    term *= nbar / static_cast<double>(n);
    sum += term;
  }
  return std::max(0.0, 1.0 - sum);
}

double gaussian_window_mass(double center, double half_width, double mean,
                            double var) {
  if (!(half_width > 0.0) || !(var > 0.0))
    throw std::domain_error("gaussian_window_mass requires positive width and variance");
  const double den = std::sqrt(2.0 * var);
  return 0.5 * (std::erf((center + half_width - mean) / den) -
                std::erf((center - half_width - mean) / den));
}

DistanceFacts classical_distance(const std::vector<cxd>& u,
                                 const std::vector<std::vector<cxd>>& vs) {
  if (u.empty() || vs.empty())
    throw std::invalid_argument("classical_distance needs u and at least one v");
  const double M = static_cast<double>(vs.size());
  std::vector<cxd> mean(u.size(), cxd(0.0, 0.0));
  double sum_v2 = 0.0;
  for (const auto& v : vs) {
    if (v.size() != u.size())
      throw std::invalid_argument("vector length mismatch in classical_distance");
    for (std::size_t i = 0; i < v.size(); ++i) {
      mean[i] += v[i] / M;
      sum_v2 += std::norm(v[i]);
    }
  }
  DistanceFacts f;
  double u2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    f.D2 += std::norm(u[i] - mean[i]);
    u2 += std::norm(u[i]);
  }
  f.N2 = u2 + sum_v2 / M;
  if (!(f.N2 > 0.0)) throw std::invalid_argument("all-zero vectors");
  f.ratio = f.D2 / (2.0 * f.N2);
  return f;
}

}  // namespace cvqml::oracle
