#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cvqml/dist.hpp"
#include "cvqml/oracles.hpp"

using namespace cvqml;
using oracle::cxd;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent route to the Dawson function: its integral representation
// F(x) = ½∫₀^∞ e^{−u²/4}·sin(x·u) du, by dense composite Simpson.
double dawson_by_integral(double x) {
  const double hi = 16.0;
  const std::size_t panels = 160000;
  const double h = hi / static_cast<double>(panels);
  auto f = [x](double u) { return std::exp(-0.25 * u * u) * std::sin(x * u); };
  double sum = f(0.0) + f(hi);
  for (std::size_t i = 1; i < panels; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
  return 0.5 * sum * h / 3.0;
}

// Independent route to the product-window mass: the product of two standard
// normals has density K₀(|t|)/π, so M(ā) = (2/π)∫₀^ā K₀(t) dt. The
// logarithmic endpoint is handled analytically: ∫₀^δ K₀ ≈ δ(1 − ln(δ/2) − γ).
double product_mass_by_bessel(double abar) {
  constexpr double euler_gamma = 0.5772156649015329;
  const double delta = abar * 1e-8;
  double integral = delta * (1.0 - std::log(0.5 * delta) - euler_gamma);
  const double v_lo = std::log(delta), v_hi = std::log(abar);
  const std::size_t panels = 20000;
  const double h = (v_hi - v_lo) / static_cast<double>(panels);
  auto f = [](double v) {
    const double t = std::exp(v);
    return t * std::cyl_bessel_k(0.0, t);
  };
  double sum = f(v_lo) + f(v_hi);
  for (std::size_t i = 1; i < panels; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(v_lo + h * static_cast<double>(i));
  integral += sum * h / 3.0;
  return 2.0 / kPi * integral;
}

// Simpson integral of samples on a uniform grid (odd number of points).
double simpson(const std::vector<double>& y, double step) {
  double sum = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  return sum * step / 3.0;
}

}  // namespace

TEST_CASE("dawson function matches its integral representation to 1e-10") {
  for (double x : {0.05, 0.15, 0.199, 0.201, 0.35, 0.7071, 1.0, 1.5, 2.0,
                   2.8284, 4.0, 5.5, 7.0, 8.485}) {
    const double ref = dawson_by_integral(x);
    CHECK(std::abs(oracle::dawson(x) - ref) <=
          1e-10 * std::max(std::abs(ref), 1e-3));
    CHECK(oracle::dawson(-x) == doctest::Approx(-oracle::dawson(x)).epsilon(1e-14));
  }
  CHECK(oracle::dawson(0.0) == 0.0);
}

TEST_CASE("sign difference: frozen value, asymptote, domain") {
  CHECK(oracle::sign_difference(0.0) == 0.0);
  // Frozen: e^{−8}·erfi(2√2) = 0.2157450297…, pinned here against the
  // independent integral-representation route at 1e−9.
  CHECK(std::abs(oracle::sign_difference(4.0) - 0.2157450297277980) < 1e-9);
  // Relative accuracy against the independent integral route across the range.
  for (double b : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
    const double ref = 2.0 / std::sqrt(kPi) * dawson_by_integral(b / std::sqrt(2.0));
    CHECK(std::abs(oracle::sign_difference(b) - ref) <= 1e-10 * std::abs(ref));
  }
  // Large-β asymptote √2/(√π·β): within 5% by β = 10 and closer at 12.
  auto asym = [](double b) { return std::sqrt(2.0) / (std::sqrt(kPi) * b); };
  CHECK(std::abs(oracle::sign_difference(10.0) / asym(10.0) - 1.0) < 0.05);
  CHECK(std::abs(oracle::sign_difference(12.0) / asym(12.0) - 1.0) <
        std::abs(oracle::sign_difference(10.0) / asym(10.0) - 1.0));
  CHECK_THROWS(oracle::sign_difference(-0.1));
  CHECK_THROWS(oracle::sign_difference(12.5));
}

TEST_CASE("distance homodyne curve: parity, sign-difference identity, domain") {
  const auto grid = uniform_grid(-6.0, 6.0, 4801);
  const double beta = 1.2, ratio = 0.3;
  const auto curve = oracle::pdist_curve(grid, beta, ratio);
  CHECK(curve.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  // Zero cross-term → the even, variance-½ Gaussian.
  const auto flat = oracle::pdist_curve(grid, beta, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(flat.density[i] - std::exp(-grid[i] * grid[i]) / std::sqrt(kPi)) <
          1e-9);
    CHECK(flat.density[i] ==
          doctest::Approx(flat.density[grid.size() - 1 - i]).epsilon(1e-12));
  }
  CHECK(flat.variance() == doctest::Approx(0.5).epsilon(1e-9));

  // P(p>0) − P(p<0) = −ratio·sign_difference(β), by Simpson quadrature of the
  // odd part on the half line.
  const std::size_t half = grid.size() / 2;  // index of p = 0
  std::vector<double> odd(half + 1);
  for (std::size_t i = 0; i <= half; ++i)
    odd[i] = curve.density[half + i] - curve.density[half - i];
  const double diff = simpson(odd, curve.step);
  CHECK(std::abs(diff - (-ratio * oracle::sign_difference(beta))) < 1e-10);

  // Odd part has the sin(√2βp) profile: proportionality at two test points.
  const auto at = [&](double p) {
    const auto it = static_cast<std::size_t>(std::lround((p - grid.front()) / curve.step));
    return curve.density[it] - curve.density[grid.size() - 1 - it];
  };
  const double p1 = 0.5, p2 = 1.25;
  const double lhs = at(p1) * std::exp(-p2 * p2) * std::sin(std::sqrt(2.0) * beta * p2);
  const double rhs = at(p2) * std::exp(-p1 * p1) * std::sin(std::sqrt(2.0) * beta * p1);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));

  CHECK_THROWS(oracle::pdist_curve(grid, beta, -0.01));
  CHECK_THROWS(oracle::pdist_curve(grid, beta, 1.01));
}

TEST_CASE("inversion amplitude: symmetry, phase limit, width, normalization") {
  const double gamma = 0.7, lambda = 1.3;
  // Swap symmetry of the closed form.
  for (auto [q, qt] : std::vector<std::pair<double, double>>{
           {0.3, 1.1}, {-0.8, 0.4}, {2.0, -2.0}}) {
    const cxd a = oracle::amplitude_Ai(q, qt, gamma, lambda, 4.0);
    const cxd b = oracle::amplitude_Ai(qt, q, gamma, lambda, 4.0);
    CHECK(std::abs(a - b) < 1e-15);
  }
  CHECK_THROWS(oracle::amplitude_Ai(0.1, 0.1, gamma, 0.0, 4.0));
  CHECK_THROWS(oracle::amplitude_Ai(0.1, 0.1, gamma, lambda, -1.0));

  // Large-squeezing phase limit e^{−i·q·q̃/(γλ)} for s ≥ 1e4/(γλ)².
  const double s_big = 1.0e4 / ((gamma * lambda) * (gamma * lambda));
  for (auto [q, qt] : std::vector<std::pair<double, double>>{
           {0.5, 0.5}, {1.0, -1.5}, {-2.0, 1.0}}) {
    const cxd a = oracle::amplitude_Ai(q, qt, gamma, lambda, s_big);
    const cxd phase = a / std::abs(a);
    const cxd expected = std::exp(cxd(0.0, -q * qt / (gamma * lambda)));
    CHECK(std::abs(phase - expected) < 1e-6);
  }

  // Joint curve built with the documented ππγ²s normalizer must carry unit
  // mass on an ample grid (the builder itself enforces 1e−8), and its
  // marginal width must be γ|λ|√(s/2) per axis in the γλs ≫ 1 regime.
  const double g2 = 1.0, l2 = 1.0, s2 = 100.0;
  const double sigma = std::sqrt((1.0 + g2 * g2 * l2 * l2 * s2 * s2) / (2.0 * s2));
  const auto grid = uniform_grid(-6.5 * sigma, 6.5 * sigma, 401);
  const auto joint = oracle::inversion_joint_curve(grid, {1.0}, {l2}, g2, s2);
  CHECK(joint.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  double var = 0.0;
  const std::size_t n = grid.size();
  for (std::size_t ix = 0; ix < n; ++ix)
    for (std::size_t iy = 0; iy < n; ++iy)
      var += grid[ix] * grid[ix] * joint.density[ix * n + iy];
  var *= joint.step_x * joint.step_y;
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(1e-3));
  CHECK(std::abs(sigma / (g2 * l2 * std::sqrt(s2 / 2.0)) - 1.0) < 1e-3);

  // Mixture density at the origin carries the weights through the documented
  // per-component prefactor.
  const std::vector<double> ws{0.3, 0.7}, ls{1.0, 0.5};
  const auto mix = oracle::inversion_joint_curve(grid, ws, ls, g2, s2);
  double expected0 = 0.0;
  for (std::size_t k = 0; k < ws.size(); ++k) {
    const double gls = g2 * ls[k] * s2;
    expected0 += ws[k] / (ls[k] * ls[k] * (1.0 + 1.0 / (gls * gls))) /
                 (kPi * g2 * g2 * s2);
  }
  const std::size_t c = n / 2;
  CHECK(mix.density[c * n + c] == doctest::Approx(expected0).epsilon(1e-7));

  CHECK_THROWS(oracle::inversion_joint_curve(grid, {0.5, 0.6}, ls, g2, s2));
  CHECK_THROWS(oracle::inversion_joint_curve(grid, {}, {}, g2, s2));
}

TEST_CASE("eigen peak mixture: single peak, bimodal symmetry, coverage") {
  const auto single_grid = uniform_grid(0.0, 3.2, 801);
  const auto single = oracle::peak_mixture(single_grid, {1.0}, {0.8}, 2.0, 25.0);
  CHECK(single.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(single.mean() == doctest::Approx(1.6).epsilon(1e-6));
  CHECK(single.variance() == doctest::Approx(1.0 / 50.0).epsilon(1e-4));

  const auto grid = uniform_grid(-2.5, 2.5, 1001);
  const auto bimodal =
      oracle::peak_mixture(grid, {0.5, 0.5}, {1.0, -1.0}, 1.0, 16.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(bimodal.density[i] ==
          doctest::Approx(bimodal.density[grid.size() - 1 - i]).epsilon(1e-12));
  const auto at = [&](double q) {
    return bimodal.density[static_cast<std::size_t>(
        std::lround((q - grid.front()) / bimodal.step))];
  };
  CHECK(at(0.0) < 1e-3 * at(1.0));   // deep valley between the two peaks
  CHECK(at(1.0) > 0.5 * std::sqrt(16.0 / kPi));

  CHECK_THROWS(oracle::peak_mixture(grid, {0.5, 0.6}, {1.0, -1.0}, 1.0, 16.0));
  CHECK_THROWS(oracle::peak_mixture(grid, {}, {}, 1.0, 16.0));
  CHECK_THROWS(oracle::peak_mixture(uniform_grid(-0.5, 0.5, 101), {1.0}, {0.8},
                                    2.0, 25.0));
}

TEST_CASE("product-window mass agrees with the Bessel-density route") {
  for (double abar : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
    const double a = oracle::product_window_mass(abar);
    const double b = product_mass_by_bessel(abar);
    CHECK(std::abs(a - b) <= 1e-7 * std::abs(b));
  }
  CHECK(oracle::product_window_mass(0.0) == 0.0);
  // Square-window small-size asymptote (2/π)·ā.
  const double asq = oracle::square_window_mass(1e-3);
  CHECK(std::abs(asq / (2.0 / kPi * 1e-3) - 1.0) < 1e-3);
}

TEST_CASE("success-rate exponent scan: slope 1.5±0.2 and spectrum independence") {
  const std::vector<double> eps{0.02, 0.05, 0.1, 0.2};
  const auto one = oracle::success_rate_exponent(1e5, 1.0, {1.0}, eps);
  CHECK(one.slope_product > 1.3);
  CHECK(one.slope_product < 1.7);
  for (std::size_t i = 1; i < one.mass_product.size(); ++i) {
    CHECK(one.mass_product[i] > one.mass_product[i - 1]);
    CHECK(one.mass_square[i] > one.mass_square[i - 1]);
  }
  CHECK(one.s_schedule.front() > one.s_schedule.back());  // regime schedule

  const auto two = oracle::success_rate_exponent(1e5, 1.0, {1.0, 0.5}, eps);
  CHECK(std::abs(two.slope_product - one.slope_product) < 0.05);

  CHECK_THROWS(oracle::success_rate_exponent(1e5, 1.0, {1.0}, {0.1}));
  CHECK_THROWS(oracle::success_rate_exponent(1e5, 1.0, {1.0}, {0.1, 0.1}));
  CHECK_THROWS(oracle::success_rate_exponent(1e5, 1.0, {}, eps));
  CHECK_THROWS(oracle::success_rate_exponent(1e5, 1.0, {0.0}, eps));
}

TEST_CASE("scalar utilities: overlaps, tails, windows, classical distance") {
  CHECK(oracle::coherent_overlap(cxd(1.0, 0.0)) ==
        doctest::Approx(0.1353352832366127).epsilon(1e-14));
  CHECK(oracle::coherent_overlap(cxd(1.0, 0.5)) ==
        doctest::Approx(std::exp(-2.5)).epsilon(1e-14));

  CHECK(oracle::poisson_tail(4.0, 8) == doctest::Approx(0.051134).epsilon(2e-4));
  CHECK(oracle::poisson_tail(4.0, 12) < oracle::poisson_tail(4.0, 8));
  CHECK(oracle::poisson_tail(0.0, 5) == 0.0);

  // Vacuum q-window ±0.1 in this convention (variance ½): erf(0.1).
  CHECK(oracle::gaussian_window_mass(0.0, 0.1, 0.0, 0.5) ==
        doctest::Approx(0.11246291601828489).epsilon(1e-12));
  CHECK(oracle::gaussian_window_mass(50.0, 0.1, 0.0, 0.5) < 1e-12);

  const auto f = oracle::classical_distance({cxd(1, 0), cxd(0, 0)},
                                            {{cxd(0, 0), cxd(1, 0)}});
  CHECK(f.D2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.N2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.ratio == doctest::Approx(0.5).epsilon(1e-14));
  const auto z = oracle::classical_distance(
      {cxd(2, 0)}, {{cxd(1, 0)}, {cxd(3, 0)}});
  CHECK(z.D2 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(z.N2 == doctest::Approx(9.0).epsilon(1e-14));
  CHECK_THROWS(oracle::classical_distance({cxd(1, 0)}, {{cxd(1, 0), cxd(0, 0)}}));
}

TEST_CASE("fit helpers recover exact power laws") {
  const auto lin = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(lin.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lin.intercept == doctest::Approx(1.0).epsilon(1e-12));
  const auto pow2 = fit_loglog({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0});
  CHECK(pow2.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS(fit_loglog({1.0, -2.0}, {1.0, 1.0}));

  Distribution1D a, b;
  a.grid = b.grid = uniform_grid(-1.0, 1.0, 201);
  a.step = b.step = a.grid[1] - a.grid[0];
  a.density.assign(201, 0.5);
  b.density.assign(201, 0.5);
  CHECK(total_variation(a, b) == 0.0);
  b.density.assign(201, 0.0);
  for (std::size_t i = 0; i < 100; ++i) b.density[i] = 1.0;
  CHECK(total_variation(a, b) > 0.4);
  Distribution1D c = a;
  c.grid = uniform_grid(-2.0, 2.0, 201);
  c.step = c.grid[1] - c.grid[0];
  CHECK_THROWS(total_variation(a, c));
}
