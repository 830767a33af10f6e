#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <vector>

#include "cvqml/dist.hpp"
#include "cvqml/fock.hpp"
#include "cvqml/gates.hpp"
#include "cvqml/rng.hpp"
#include "doctest.h"

using namespace cvqml;

namespace {

constexpr double kPi = std::numbers::pi;

// Random single-mode amplitudes of length `dim`, supported on the lowest
// `levels` Fock states, so swap-style gates act inside protected sectors.
Vec bottom_state(int dim, int levels, Rng& rng) {
  Vec v = Vec::Zero(dim);
  v.head(levels) = random_unit_vector(levels, rng);
  return v;
}

FockVector dual_rail_plus(const FockCutoff& cut,
                          const std::vector<Vec>& rest) {
  std::vector<Vec> a = {Vec(2), Vec(2)};
  a[0] << 1.0, 0.0;
  a[1] << 0.0, 1.0;
  for (const auto& v : rest) a.push_back(v);
  FockVector s01 = product_state(cut, a);
  std::swap(a[0], a[1]);
  FockVector s10 = product_state(cut, a);
  s01.amps = (s01.amps + s10.amps) / std::sqrt(2.0);
  return s01;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("kron lays out blocks in row-major mode order") {
  Mat a(2, 2), b(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  b << 0.0, 1.0, 1.0, 0.0;
  const Mat k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(std::abs(k(0, 1) - cxd(1.0, 0.0)) < 1e-15);  // a00*b01
  CHECK(std::abs(k(2, 3) - cxd(4.0, 0.0)) < 1e-15);  // a11*b01
  CHECK(std::abs(k(3, 2) - cxd(4.0, 0.0)) < 1e-15);  // a11*b10
}

TEST_CASE("rotation_R: identity at zero, photon exchange at quarter turn") {
  FockCutoff cut({2, 2});
  const ModeOperator r0 = rotation_R(cut, 0, 1, 0.0);
  CHECK(max_abs(r0.mat - Mat::Identity(4, 4)) < 1e-12);

  // On the dual-rail pair {|01⟩, |10⟩} the generator acts as a Pauli-X, so a
  // quarter turn sends |01⟩ → i|10⟩.
  const ModeOperator r = rotation_R(cut, 0, 1, kPi / 2.0);
  FockVector s = basis_state(cut, {0, 1});
  apply(s, r);
  const FockVector t = basis_state(cut, {1, 0});
  CHECK(std::abs(overlap(t, s) - cxd(0.0, 1.0)) < 1e-12);

  // Block entries at general angle: cos on the diagonal, i·sin off it.
  const double th = 0.3;
  const ModeOperator rt = rotation_R(cut, 0, 1, th);
  FockVector u = basis_state(cut, {0, 1});
  apply(u, rt);
  CHECK(std::abs(overlap(basis_state(cut, {0, 1}), u) - cxd(std::cos(th), 0)) <
        1e-12);
  CHECK(std::abs(overlap(basis_state(cut, {1, 0}), u) -
                 cxd(0.0, std::sin(th))) < 1e-12);

  // Composition: R(a)R(b) = R(a+b).
  const ModeOperator ra = rotation_R(cut, 0, 1, 0.7);
  const ModeOperator rb = rotation_R(cut, 0, 1, 0.5);
  const ModeOperator rab = rotation_R(cut, 0, 1, 1.2);
  CHECK(max_abs(ra.mat * rb.mat - rab.mat) < 1e-10);
}

TEST_CASE("beamsplitter_50_50 obeys the coherent-state mixing law") {
  FockCutoff cut({25, 25});
  const ModeOperator bs = beamsplitter_50_50(cut, 0, 1);

  // Vacuum is invariant.
  FockVector vac = vacuum_state(cut);
  apply(vac, bs);
  CHECK(fidelity(vac, vacuum_state(cut)) == doctest::Approx(1.0).epsilon(1e-12));

  // Single photon splits evenly: |1,0⟩ → (|1,0⟩ + |0,1⟩)/√2.
  FockVector one = basis_state(cut, {1, 0});
  apply(one, bs);
  CHECK(std::abs(overlap(basis_state(cut, {1, 0}), one) -
                 cxd(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
  CHECK(std::abs(overlap(basis_state(cut, {0, 1}), one) -
                 cxd(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);

  // |α,β⟩ → |(α−β)/√2, (α+β)/√2⟩.
  const cxd al(0.7, 0.2), be(-0.3, 0.4);
  FockVector in = product_state(
      cut, {coherent_amplitudes(25, al), coherent_amplitudes(25, be)});
  in.amps /= in.amps.norm();
  apply(in, bs);
  FockVector out = product_state(
      cut, {coherent_amplitudes(25, (al - be) / std::sqrt(2.0)),
            coherent_amplitudes(25, (al + be) / std::sqrt(2.0))});
  out.amps /= out.amps.norm();
  CHECK(fidelity(in, out) > 1.0 - 1e-10);

  // Two passes rotate by a half turn: |1,0⟩ → |0,1⟩ exactly.
  FockVector twice = basis_state(cut, {1, 0});
  apply(twice, bs);
  apply(twice, bs);
  CHECK(std::abs(overlap(basis_state(cut, {0, 1}), twice) - cxd(1.0, 0.0)) <
        1e-12);
}

TEST_CASE("controlled_swap: inert on control |0⟩, exact swap on control |1⟩") {
  FockCutoff cut({2, 6, 6});
  const ModeOperator cs = controlled_swap(cut, 0, 1, 2);
  Rng rng(11);

  for (int trial = 0; trial < 10; ++trial) {
    const Vec psi = bottom_state(6, 3, rng);
    const Vec phi = bottom_state(6, 3, rng);
    Vec ctrl0 = Vec::Zero(2), ctrl1 = Vec::Zero(2);
    ctrl0(0) = 1.0;
    ctrl1(1) = 1.0;

    FockVector s0 = product_state(cut, {ctrl0, psi, phi});
    const FockVector s0_in = s0;
    apply(s0, cs);
    CHECK(std::abs(overlap(s0_in, s0) - cxd(1.0, 0.0)) < 1e-10);

    FockVector s1 = product_state(cut, {ctrl1, psi, phi});
    apply(s1, cs);
    const FockVector swapped = product_state(cut, {ctrl1, phi, psi});
    // Phase-sensitive: the swap carries no extra phase on protected sectors.
    CHECK(std::abs(overlap(swapped, s1) - cxd(1.0, 0.0)) < 1e-9);

    apply(s1, cs);
    CHECK(std::abs(overlap(product_state(cut, {ctrl1, psi, phi}), s1) -
                   cxd(1.0, 0.0)) < 1e-9);
  }

  CHECK_THROWS_AS(controlled_swap(FockCutoff({2, 5, 6}), 0, 1, 2),
                  std::invalid_argument);
}

TEST_CASE("exp_swap produces cosθ|ψφ⟩ + i sinθ|φψ⟩ with ancillas restored") {
  FockCutoff cut({2, 2, 6, 6});
  Rng rng(23);
  FockCutoff anc_cut({2, 2});
  FockVector plus = basis_state(anc_cut, {0, 1});
  plus.amps = (plus.amps + basis_state(anc_cut, {1, 0}).amps) / std::sqrt(2.0);

  for (double th : {0.0, kPi / 6.0, kPi / 4.0, kPi / 2.0}) {
    const ModeOperator u = exp_swap(cut, th, 0, 1, 2, 3);
    for (int trial = 0; trial < 4; ++trial) {
      const Vec psi = bottom_state(6, 3, rng);
      const Vec phi = bottom_state(6, 3, rng);
      FockVector in = dual_rail_plus(cut, {psi, phi});
      FockVector out = in;
      apply(out, u);

      FockVector direct = dual_rail_plus(cut, {psi, phi});
      FockVector swapped = dual_rail_plus(cut, {phi, psi});
      FockVector expect = direct;
      expect.amps =
          std::cos(th) * direct.amps + cxd(0.0, std::sin(th)) * swapped.amps;
      CHECK(fidelity(out, expect) > 1.0 - 1e-10);

      const DensityMatrix anc = partial_trace(out, {0, 1});
      CHECK(fidelity(anc, plus) > 1.0 - 1e-10);
      CHECK(dual_rail_leakage(out, 0, 1) < 1e-10);
    }
  }

  // Composition in θ on a fixed input.
  const Vec psi = bottom_state(6, 3, rng);
  const Vec phi = bottom_state(6, 3, rng);
  FockVector a = dual_rail_plus(cut, {psi, phi});
  apply(a, exp_swap(cut, 0.4, 0, 1, 2, 3));
  apply(a, exp_swap(cut, 0.3, 0, 1, 2, 3));
  FockVector b = dual_rail_plus(cut, {psi, phi});
  apply(b, exp_swap(cut, 0.7, 0, 1, 2, 3));
  CHECK(fidelity(a, b) > 1.0 - 1e-10);
}

TEST_CASE("exp_multi_swap acts on every registered pair at once") {
  FockCutoff cut({2, 2, 3, 3, 3, 3});
  Rng rng(37);
  const double th = kPi / 4.0;
  const ModeOperator u = exp_multi_swap(cut, th, 0, 1, {{2, 3}, {4, 5}});

  for (int trial = 0; trial < 4; ++trial) {
    const Vec p1 = bottom_state(3, 2, rng), f1 = bottom_state(3, 2, rng);
    const Vec p2 = bottom_state(3, 2, rng), f2 = bottom_state(3, 2, rng);
    FockVector out = dual_rail_plus(cut, {p1, f1, p2, f2});
    apply(out, u);

    FockVector direct = dual_rail_plus(cut, {p1, f1, p2, f2});
    FockVector swapped = dual_rail_plus(cut, {f1, p1, f2, p2});
    FockVector expect = direct;
    expect.amps =
        std::cos(th) * direct.amps + cxd(0.0, std::sin(th)) * swapped.amps;
    CHECK(fidelity(out, expect) > 1.0 - 1e-9);
  }

  CHECK_THROWS_AS(exp_multi_swap(cut, th, 0, 1, {{2, 3}, {3, 4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(exp_multi_swap(cut, th, 0, 1, {{1, 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(exp_multi_swap(cut, th, 0, 1, {}), std::invalid_argument);
}

TEST_CASE("rotation_R_pR equals the dense exponential of hop ⊗ p") {
  FockCutoff cut({2, 2, 20});
  const double delta = 0.37;
  const ModeOperator u = rotation_R_pR(cut, delta, 0, 1, 2);

  const Mat hop = kron(a_op(2), adag_op(2)) + kron(adag_op(2), a_op(2));
  const Mat gen = kron(hop, p_op(20));
  const Mat direct = expi_hermitian(gen, delta);
  CHECK(max_abs(u.mat - direct) < 1e-9);

  const ModeOperator id = rotation_R_pR(cut, 0.0, 0, 1, 2);
  CHECK(max_abs(id.mat - Mat::Identity(80, 80)) < 1e-12);

  CHECK_THROWS_AS(rotation_R_pR(FockCutoff({2, 2, 2048}), 0.1, 0, 1, 2),
                  std::invalid_argument);
}

TEST_CASE("rotation_R_pRpS equals the dense exponential of hop ⊗ p ⊗ p") {
  FockCutoff cut({2, 2, 12, 12});
  const double gamma = 0.21;
  const ModeOperator u = rotation_R_pRpS(cut, gamma, 0, 1, 2, 3);

  const Mat hop = kron(a_op(2), adag_op(2)) + kron(adag_op(2), a_op(2));
  const Mat gen = kron(hop, kron(p_op(12), p_op(12)));
  const Mat direct = expi_hermitian(gen, gamma);
  CHECK(max_abs(u.mat - direct) < 1e-9);

  const ModeOperator id = rotation_R_pRpS(cut, 0.0, 0, 1, 2, 3);
  CHECK(max_abs(id.mat - Mat::Identity(576, 576)) < 1e-12);

  CHECK_THROWS_AS(rotation_R_pRpS(FockCutoff({2, 2, 64, 64}), 0.1, 0, 1, 2, 3),
                  std::invalid_argument);
}

TEST_CASE("dual_rail_leakage measures mass outside the single-photon pair") {
  FockCutoff cut({2, 2, 4});
  Rng rng(5);
  FockVector good = dual_rail_plus(cut, {bottom_state(4, 4, rng)});
  CHECK(dual_rail_leakage(good, 0, 1) < 1e-14);

  FockVector bad = basis_state(cut, {0, 0, 2});
  CHECK(dual_rail_leakage(bad, 0, 1) == doctest::Approx(1.0));

  // Half the mass in |00⟩, half in |01⟩ on the rail pair.
  FockVector mix = basis_state(cut, {0, 0, 1});
  mix.amps = (mix.amps + basis_state(cut, {0, 1, 2}).amps) / std::sqrt(2.0);
  CHECK(dual_rail_leakage(mix, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("compile_poly_phase factors multiply to 1 + i(γ/K)P(x̂) per block") {
  PolyPhaseSpec spec{0.2, {0.1, -0.3, 0.0, 0.25}, 5};
  const int dim = 12;
  const GateSequence seq = compile_poly_phase(spec, dim);
  REQUIRE(seq.factors.size() == 15);  // K blocks of deg=3 factors
  CHECK(seq.K == 5);

  const Mat x = q_op(dim);
  Mat p = Mat::Zero(dim, dim), xp = Mat::Identity(dim, dim);
  for (double c : spec.coeffs) {
    p += c * xp;
    xp = xp * x;
  }
  const Mat block_target =
      Mat::Identity(dim, dim) + cxd(0.0, spec.gamma / spec.K) * p;
  Mat block = Mat::Identity(dim, dim);
  for (int l = 0; l < 3; ++l) block = seq.factors[l].op.mat * block;
  CHECK(max_abs(block - block_target) < 1e-10);

  // The whole product is the block to the K-th power.
  Mat full = Mat::Identity(dim, dim);
  for (const auto& f : seq.factors) full = f.op.mat * full;
  Mat pw = Mat::Identity(dim, dim);
  for (int k = 0; k < spec.K; ++k) pw = block * pw;
  CHECK(max_abs(full - pw) < 1e-9);

  // Identity edge cases and rejected inputs.
  const GateSequence empty = compile_poly_phase({0.0, {0, 0, 0, 1.0}, 4}, 8);
  CHECK(empty.factors.empty());
  CHECK(max_abs(empty.target_matrix() - Mat::Identity(8, 8)) < 1e-14);
  const GateSequence zerop = compile_poly_phase({1.0, {0.0, 0.0}, 4}, 8);
  CHECK(zerop.factors.empty());
  CHECK_THROWS_AS(compile_poly_phase({0.1, {0, 0, 0, 0, 0, 1.0}, 4}, 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(compile_poly_phase({0.1, {0, 1.0}, 4}, 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(compile_poly_phase({0.1, {0, 0, 0, 1.0}, 0}, 8),
                  std::invalid_argument);
}

TEST_CASE("compile_poly_phase error on the low subspace scales as 1/K") {
  PolyPhaseSpec spec{0.1, {0.0, 0.0, 0.0, 0.25}, 1};
  const int dim = 16;
  const std::vector<int> levels = {8};

  std::vector<double> ks, errs;
  for (int k : {4, 8, 16, 32, 64}) {
    spec.K = k;
    const GateSequence seq = compile_poly_phase(spec, dim);
    ks.push_back(k);
    errs.push_back(seq.error(levels));
  }
  std::printf("poly-phase errors vs K:");
  for (std::size_t i = 0; i < ks.size(); ++i)
    std::printf(" K=%g:%.3e", ks[i], errs[i]);
  std::printf("\n");

  const LineFit fit = fit_loglog(ks, errs);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.2));
  // Doubling K three times cuts the error by ≈ 8.
  CHECK(errs[1] / errs[4] == doctest::Approx(8.0).epsilon(0.5));

  // Weak drive: the non-unitary factors stay unitary to within 1e-6.
  const GateSequence weak =
      compile_poly_phase({1e-3, {0.0, 0.0, 0.0, 0.05}, 64}, dim);
  CHECK(weak.unitarity_defect(levels) < 1e-6);
  CHECK(weak.renorm(levels) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("compile_quartic_US chain equals the cross-quartic exponential") {
  const int k = 2, d1 = 4, dc = 4;
  const GateSequence seq = compile_quartic_US(k, d1, dc);
  REQUIRE(seq.factors.size() == static_cast<std::size_t>(k) * 24);
  const double th_cross = kPi / (4.0 * k);

  const Mat x1 = q_op(d1), xc = q_op(dc);
  const Mat cross = kron(x1 * x1, xc * xc);

  // Factors 0..3: the x̂₁²x̂_c² polarization chain.
  Mat chain = Mat::Identity(16, 16);
  for (int i = 0; i < 4; ++i)
    chain = embed(seq.factors[i].op, seq.cutoff) * chain;
  CHECK(max_abs(chain - expi_hermitian(cross, th_cross)) < 1e-10);

  // Factors 4..9: the same chain conjugated into x̂₁²p̂_c².
  Mat conj = Mat::Identity(16, 16);
  for (int i = 4; i < 10; ++i)
    conj = embed(seq.factors[i].op, seq.cutoff) * conj;
  const Mat cross_qp = kron(x1 * x1, p_op(dc) * p_op(dc));
  CHECK(max_abs(conj - expi_hermitian(cross_qp, th_cross)) < 1e-9);

  // Every factor is unitary, so the product is too.
  const Mat u = seq.product();
  CHECK(max_abs(u.adjoint() * u - Mat::Identity(16, 16)) < 1e-10);
}

TEST_CASE("compile_quartic_US error on the low subspace scales as 1/K") {
  struct Config {
    int d1, dc, l1, lc;
  };
  // Larger boxes saturate the operator-norm ceiling at small K (per-mode dim 8
  // reaches slope ≈ −0.4 over this K range); these two stay in the 1/K regime.
  for (const Config& cfg : {Config{4, 4, 2, 2}, Config{6, 6, 3, 3}}) {
    const std::vector<int> levels = {cfg.l1, cfg.lc};
    std::vector<double> ks, errs;
    for (int k : {4, 8, 16, 32}) {
      const GateSequence seq = compile_quartic_US(k, cfg.d1, cfg.dc);
      ks.push_back(k);
      errs.push_back(seq.error(levels));
    }
    std::printf("quartic dims (%d,%d) low (%d,%d) errors vs K:", cfg.d1,
                cfg.dc, cfg.l1, cfg.lc);
    for (std::size_t i = 0; i < ks.size(); ++i)
      std::printf(" K=%g:%.3e", ks[i], errs[i]);
    const LineFit fit = fit_loglog(ks, errs);
    std::printf("  slope=%.3f\n", fit.slope);
    CHECK(errs[0] < 1.9);  // below the trivial operator-norm ceiling
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.2));
  }
}
