#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cvqml/fock.hpp"
#include "cvqml/measurement.hpp"
#include "cvqml/oracles.hpp"
#include "cvqml/rng.hpp"

using namespace cvqml;

namespace {
constexpr double kPi = std::numbers::pi;

FockVector lift(const FockVector& one_mode) { return one_mode; }
}  // namespace

TEST_CASE("vacuum and coherent quadrature densities are the expected Gaussians") {
  const auto vac = vacuum_state(FockCutoff({24}));
  const auto pdf = homodyne_pdf(vac, 0, Quadrature::Q);
  CHECK(pdf.variance() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(pdf.mean() == doctest::Approx(0.0).epsilon(1e-9));
  for (std::size_t g = 0; g < pdf.grid.size(); g += 97) {
    const double x = pdf.grid[g];
    CHECK(std::abs(pdf.density[g] - std::exp(-x * x) / std::sqrt(kPi)) < 1e-8);
  }
  const auto pdfp = homodyne_pdf(vac, 0, Quadrature::P);
  CHECK(pdfp.variance() == doctest::Approx(0.5).epsilon(1e-6));

  // Displacement shows up as √2·Re α in q and √2·Im α in p.
  const cxd alpha(1.1, -0.4);
  const auto coh = make_coherent(alpha, 40);
  const auto cq = homodyne_pdf(coh, 0, Quadrature::Q);
  const auto cp = homodyne_pdf(coh, 0, Quadrature::P);
  CHECK(cq.mean() == doctest::Approx(std::sqrt(2.0) * alpha.real()).epsilon(1e-7));
  CHECK(cp.mean() == doctest::Approx(std::sqrt(2.0) * alpha.imag()).epsilon(1e-7));
  CHECK(cq.variance() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(cp.variance() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("squeezed ancilla densities have variances 1/(2s) and s/2") {
  const double s = 4.0;
  const auto anc = make_squeezed_ancilla(s, 64);
  const auto q = homodyne_pdf(anc, 0, Quadrature::Q);
  const auto p = homodyne_pdf(anc, 0, Quadrature::P);
  CHECK(q.variance() == doctest::Approx(1.0 / (2.0 * s)).epsilon(1e-6));
  CHECK(p.variance() == doctest::Approx(s / 2.0).epsilon(1e-6));
}

TEST_CASE("one-photon density has the 2x²e^{−x²}/√π profile") {
  const auto one = make_fock(1, 16);
  const auto pdf = homodyne_pdf(one, 0, Quadrature::Q);
  for (std::size_t g = 0; g < pdf.grid.size(); g += 131) {
    const double x = pdf.grid[g];
    CHECK(std::abs(pdf.density[g] - 2.0 * x * x * std::exp(-x * x) / std::sqrt(kPi)) <
          1e-8);
  }
}

TEST_CASE("momentum density equals position density of the phase-rotated state") {
  Rng rng(421);
  FockVector psi;
  psi.cutoff = FockCutoff({16});
  psi.amps = random_unit_vector(16, rng);
  FockVector rotated = psi;
  cxd f(1.0, 0.0);
  for (int n = 0; n < 16; ++n, f *= cxd(0.0, -1.0)) rotated.amps(n) *= f;
  const auto grid = uniform_grid(-7.0, 7.0, 1401);
  const auto via_p = homodyne_pdf(psi, 0, Quadrature::P, grid);
  const auto via_q = homodyne_pdf(rotated, 0, Quadrature::Q, grid);
  CHECK(total_variation(via_p, via_q) < 1e-12);
}

TEST_CASE("marginal of a product state ignores the spectator mode") {
  const auto m0 = make_coherent(cxd(0.6, 0.2), 12);
  const auto m1 = make_squeezed_ancilla(2.0, 14);
  const auto joint = tensor(m0, m1);
  const auto grid = uniform_grid(-6.0, 6.0, 1201);
  const auto from_joint = homodyne_pdf(joint, 1, Quadrature::Q, grid);
  const auto alone = homodyne_pdf(lift(m1), 0, Quadrature::Q, grid);
  double worst = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g)
    worst = std::max(worst, std::abs(from_joint.density[g] - alone.density[g]));
  CHECK(worst < 1e-10);
}

TEST_CASE("seeded sampling reproduces the density and collapses the mode") {
  const double s = 25.0;
  const auto anc = make_squeezed_ancilla(s, 192);
  Rng rng(777);
  std::vector<double> outcomes;
  const int shots = 20000;
  const auto grid = uniform_grid(-1.0, 1.0, 401);
  const auto pdf = homodyne_pdf(anc, 0, Quadrature::Q, grid);
  for (int k = 0; k < shots; ++k) {
    FockVector copy = anc;
    outcomes.push_back(homodyne_collapse(copy, 0, Quadrature::Q, rng, pdf));
  }
  double mean = 0.0, var = 0.0;
  for (double o : outcomes) mean += o;
  mean /= shots;
  for (double o : outcomes) var += (o - mean) * (o - mean);
  var /= shots;
  const double sd_mean = std::sqrt(1.0 / (2.0 * s) / shots);
  CHECK(std::abs(mean) < 4.0 * sd_mean);
  CHECK(var == doctest::Approx(1.0 / (2.0 * s)).epsilon(0.1));
  // Total variation against the density, binned coarsely enough that the
  // multinomial fluctuation floor at this shot count sits well below the bound.
  const auto coarse = uniform_grid(-1.0, 1.0, 101);
  const auto pdf_c = homodyne_pdf(anc, 0, Quadrature::Q, coarse);
  CHECK(total_variation(histogram(outcomes, coarse), pdf_c) < 0.03);
  CHECK(ks_statistic(outcomes, pdf) < 0.015);

  // Same seed → identical stream.
  Rng rng2(777);
  for (int k = 0; k < 10; ++k) {
    FockVector copy = anc;
    CHECK(homodyne_collapse(copy, 0, Quadrature::Q, rng2, pdf) == outcomes[k]);
  }

  // Collapse concentrates the mode at the recorded outcome: the post-collapse
  // density is a band-limited position kernel whose peak sits at the outcome
  // (its sidelobes spread wide, so locate the peak on the default grid).
  Rng rng3(9);
  FockVector copy = anc;
  const double xc = homodyne_collapse(copy, 0, Quadrature::Q, rng3, pdf);
  // Grid spanning the whole truncated support: the kernel's 1/x² sidelobes
  // carry mass out to the classical turning point ±√(2·dim).
  const auto post =
      homodyne_pdf(copy, 0, Quadrature::Q, uniform_grid(-24.0, 24.0, 4801));
  const auto peak =
      std::max_element(post.density.begin(), post.density.end());
  const double xpeak =
      post.grid[static_cast<std::size_t>(peak - post.density.begin())];
  CHECK(std::abs(xpeak - xc) < post.step + pdf.step);
  auto cell = static_cast<std::size_t>(
      std::lround((xc - grid.front()) / pdf.step));
  CHECK(copy.renorm ==
        doctest::Approx(pdf.density[cell] * pdf.step).epsilon(1e-9));
}

TEST_CASE("window post-selection reproduces the frozen vacuum mass erf(0.1)") {
  auto vac = vacuum_state(FockCutoff({24}));
  const double success = postselect(vac, 0, Quadrature::Q, {0.0, 0.1});
  CHECK(success == doctest::Approx(0.11246291601828489).epsilon(1e-9));
  CHECK(vac.renorm == doctest::Approx(success).epsilon(1e-12));
  CHECK(std::abs(vac.amps.norm() - 1.0) < 1e-12);

  // Same window in momentum on a squeezed state: N(0, s/2) mass.
  auto anc = make_squeezed_ancilla(4.0, 64);
  const double sp = postselect(anc, 0, Quadrature::P, {0.0, 0.1});
  CHECK(sp == doctest::Approx(oracle::gaussian_window_mass(0.0, 0.1, 0.0, 2.0))
                  .epsilon(1e-8));

  // Far-off window throws rather than returning a zero state.
  auto vac2 = vacuum_state(FockCutoff({24}));
  CHECK_THROWS(postselect(vac2, 0, Quadrature::Q, {40.0, 0.1}));
}

TEST_CASE("disjoint windows partition the line: masses sum to one") {
  const auto coh = make_coherent(cxd(0.9, 0.0), 40);
  double sum = 0.0;
  const int windows = 16;
  const double hw = 0.5, lo = -8.0;
  for (int k = 0; k < windows; ++k) {
    auto copy = coh;
    sum += postselect(copy, 0, Quadrature::Q,
                      {lo + hw * (2 * k + 1), hw});
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("joint density factorizes for products and matches entangled pairs") {
  const auto ga = uniform_grid(-5.0, 5.0, 201);
  const auto m0 = make_coherent(cxd(0.4, 0.0), 14);
  const auto m1 = make_fock(1, 14);
  const auto prod = tensor(m0, m1);
  const auto joint = homodyne_joint_pdf(prod, 0, 1, Quadrature::Q, Quadrature::Q,
                                        ga, ga);
  const auto pa = homodyne_pdf(lift(m0), 0, Quadrature::Q, ga);
  const auto pb = homodyne_pdf(lift(m1), 0, Quadrature::Q, ga);
  double worst = 0.0;
  for (std::size_t ix = 0; ix < ga.size(); ++ix)
    for (std::size_t iy = 0; iy < ga.size(); ++iy)
      worst = std::max(worst,
                       std::abs(joint.density[ix * ga.size() + iy] -
                                pa.density[ix] * pb.density[iy]));
  CHECK(worst < 1e-9);

  // (|00⟩ + |11⟩)/√2 : density ½·(φ₀(x)φ₀(y) + φ₁(x)φ₁(y))².
  FockVector bell;
  bell.cutoff = FockCutoff({2, 2});
  bell.amps = Vec::Zero(4);
  bell.amps(0) = bell.amps(3) = 1.0 / std::sqrt(2.0);
  const auto jb = homodyne_joint_pdf(bell, 0, 1, Quadrature::Q, Quadrature::Q,
                                     ga, ga);
  for (std::size_t ix = 0; ix < ga.size(); ix += 13)
    for (std::size_t iy = 0; iy < ga.size(); iy += 13) {
      const RVec fx = hermite_functions(2, ga[ix]);
      const RVec fy = hermite_functions(2, ga[iy]);
      const double expect =
          0.5 * std::pow(fx(0) * fy(0) + fx(1) * fy(1), 2);
      CHECK(std::abs(jb.density[ix * ga.size() + iy] - expect) < 1e-9);
    }

  // Row sums of the joint recover the marginal.
  Distribution1D marg;
  marg.grid = ga;
  marg.step = jb.step_x;
  marg.density.assign(ga.size(), 0.0);
  for (std::size_t ix = 0; ix < ga.size(); ++ix)
    for (std::size_t iy = 0; iy < ga.size(); ++iy)
      marg.density[ix] += jb.density[ix * ga.size() + iy] * jb.step_y;
  const auto direct = homodyne_pdf(bell, 0, Quadrature::Q, ga);
  CHECK(total_variation(marg, direct) < 1e-8);
}

TEST_CASE("basis functions survive far from the origin: displaced Gaussian") {
  // A coherent state centred at q₀ = 45 lives entirely beyond the point
  // where e^{-q²/2} underflows, so its density exercises the scaled
  // three-term recursion: every level must be reconstructed from carries.
  const double q0 = 45.0;
  const cxd alpha(q0 / std::sqrt(2.0), 0.0);
  const auto state = make_coherent(alpha, 1280);
  const auto pdf =
      homodyne_pdf(state, 0, Quadrature::Q, uniform_grid(25.0, 65.0, 1601));
  CHECK(pdf.mean() == doctest::Approx(q0).epsilon(1e-6));
  CHECK(pdf.variance() == doctest::Approx(0.5).epsilon(1e-4));

  // Spot values against the closed-form Gaussian e^{-(q-q₀)²}/√π.
  for (std::size_t g = 0; g < pdf.grid.size(); g += 67) {
    const double x = pdf.grid[g];
    CHECK(std::abs(pdf.density[g] -
                   std::exp(-(x - q0) * (x - q0)) / std::sqrt(kPi)) < 1e-6);
  }

  // The raw recursion values: oscillatory levels near n ≈ q₀²/2 are O(0.1)
  // even though the ground level is ~e^{-1012}; and small-argument values
  // agree with the direct formulas.
  const RVec far = hermite_functions(1280, q0);
  CHECK(far.cwiseAbs().maxCoeff() > 0.05);
  CHECK(std::isfinite(far.sum()));
  const RVec near = hermite_functions(3, 1.3);
  const double f0 = std::pow(kPi, -0.25) * std::exp(-0.5 * 1.3 * 1.3);
  CHECK(near(0) == doctest::Approx(f0).epsilon(1e-12));
  CHECK(near(1) == doctest::Approx(std::sqrt(2.0) * 1.3 * f0).epsilon(1e-12));
  CHECK(near(2) ==
        doctest::Approx((2.0 * 1.3 * 1.3 - 1.0) / std::sqrt(2.0) * f0)
            .epsilon(1e-12));
}
