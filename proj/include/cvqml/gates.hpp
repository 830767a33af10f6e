#pragma once
// Gate constructions: mode-pair rotations and beamsplitters, the photon-
// number-controlled swap, exponential-swap gadgets (scalar and operator-
// valued angles), and compilers that reduce non-Gaussian phase gates to
// sequences of elementary factors, each paired with a direct matrix-
// exponential reference path.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvqml/fock.hpp"

namespace cvqml {

// Kronecker product in listed-mode order: the left factor owns the slower
// index, matching ModeOperator's row-major convention.
Mat kron(const Mat& a, const Mat& b);

// e^{iθ(a₁a₂† + a₁†a₂)} on (m1, m2). Photon-number conserving; on the
// one-photon subspace {|01⟩, |10⟩} it acts as the 2×2 matrix
// (cos θ, i sin θ; i sin θ, cos θ), so R(θ₁)R(θ₂) = R(θ₁+θ₂).
ModeOperator rotation_R(const FockCutoff& cutoff, int m1, int m2, double theta);

// 50:50 beamsplitter e^{(π/4)(a₁a₂† − a₁†a₂)}: maps coherent |α, β⟩ to
// |(α−β)/√2, (α+β)/√2⟩.
ModeOperator beamsplitter_50_50(const FockCutoff& cutoff, int m1, int m2);

// Photon-number-controlled swap on (c, c′): the cross-Kerr phase
// e^{iπ n̂_ctrl n̂_c} conjugated by the 50:50 beamsplitter on (c, c′).
// With one photon in the control mode the pair is swapped (up to a global
// phase); with zero photons nothing happens. Requires dim(c) == dim(c′).
ModeOperator controlled_swap(const FockCutoff& cutoff, int control, int c,
                             int cp);

// Exponential swap e^{iθS} on (c, c′) via a dual-rail ancilla pair: the
// sequence controlled-swap · R(θ) on the ancillas · controlled-swap.
// Acting on ancillas prepared in |+⟩ = (|01⟩+|10⟩)/√2 it applies
// cos θ·I + i sin θ·SWAP to (c, c′) and returns the ancillas to |+⟩
// exactly. Operator acts on (anc1, anc2, c, c′).
ModeOperator exp_swap(const FockCutoff& cutoff, double theta, int anc1,
                      int anc2, int c, int cp);

// Multi-pair exponential swap e^{iθ·S₁S₂⋯}: every pair's controlled-swap
// (all driven by the same ancilla) before and after one ancilla rotation.
// Pairs must be disjoint. Operator acts on (anc1, anc2, pair modes...).
ModeOperator exp_multi_swap(const FockCutoff& cutoff, double theta, int anc1,
                            int anc2,
                            const std::vector<std::pair<int, int>>& pairs);

// Operator-valued rotation e^{iδ·p̂_R·(a₁a₂†+a₁†a₂)} on (m1, m2, resource):
// conditioned on resource momentum p, rotates the pair by δ·p. Built by
// splitting the pair generator spectrally, so only the resource quadrature
// is exponentiated per branch.
ModeOperator rotation_R_pR(const FockCutoff& cutoff, double delta, int m1,
                           int m2, int resource);

// Two-resource variant e^{iγ·p̂_R·p̂_S·(a₁a₂†+a₁†a₂)} on (m1, m2, r1, r2).
ModeOperator rotation_R_pRpS(const FockCutoff& cutoff, double gamma, int m1,
                             int m2, int r1, int r2);

// Probability mass of the (m1, m2) pair outside the dual-rail subspace
// span{|01⟩, |10⟩}, relative to the state's norm.
double dual_rail_leakage(const FockVector& state, int m1, int m2);

// ---- compiled sequences ------------------------------------------------------

// Specification of e^{iγP(x̂)} with P a cubic or quartic polynomial, to be
// realized as K identical blocks of linear factors (1 + γ_l·x̂) whose γ_l
// come from the roots of 1 + i(γ/K)P(z).
struct PolyPhaseSpec {
  double gamma = 0.0;
  std::vector<double> coeffs;  // coeffs[j] multiplies x̂^j; degree 3 or 4
  int K = 1;
};

// One factor of a compiled sequence: the bound operator plus a serializable
// description (kind tag, acted modes, kind-specific parameters).
//   "linear_x"       params {Re γ, Im γ, Re scale, Im scale}: scale·(1 + γx̂)
//   "mode_phase"     params {φ}: e^{iφn̂}
//   "quartic_phase"  params {θ, s per listed mode...}: e^{iθ(Σ s_m x̂_m)⁴}
struct CompiledFactor {
  std::string kind;
  std::vector<int> modes;
  std::vector<double> params;
  ModeOperator op;
};

// A compiled factor list with its reference target. Factors apply in list
// order (factors[0] acts first), so the full-space matrix is
// F_{n−1}·…·F_1·F_0.
struct GateSequence {
  FockCutoff cutoff;
  std::vector<CompiledFactor> factors;
  std::optional<ModeOperator> target;
  int K = 1;

  Mat product() const;
  Mat target_matrix() const;  // embedded target; throws if absent

  // Low-energy subspace = bottom `levels[m]` Fock states of every mode m.
  // renorm: largest singular value of the product restricted to it.
  // error: ‖(product − target)·P_low‖ in operator norm.
  // unitarity_defect: ‖P(U†U − I)P‖ for U = product / renorm.
  double renorm(const std::vector<int>& levels) const;
  double error(const std::vector<int>& levels) const;
  double unitarity_defect(const std::vector<int>& levels) const;
};

// Compile e^{iγP(x̂)} on one mode of dimension `dim`: per block, the roots
// z_l of 1 + i(γ/K)P(z) give linear factors (1 + γ_l·x̂) with γ_l = −1/z_l
// (the constant term folded into the first factor), repeated for K blocks.
// A zero polynomial (or γ = 0) compiles to the empty identity sequence.
// Throws on degree outside {3, 4}, K < 1, or relative root residuals
// above 1e−8.
GateSequence compile_poly_phase(const PolyPhaseSpec& spec, int dim);

// Compile e^{iπH₁H_c}, H = (q̂²+p̂²)/2 per mode, as K first-order Trotter
// steps over the four cross-quadratic factors e^{i(π/4K)·AB} with
// A ∈ {q̂₁², p̂₁²}, B ∈ {q̂_c², p̂_c²}. Each factor reduces to quartic
// phases via the polarization identity
//   x²y² = [(x+y)⁴ + (x−y)⁴ − 2x⁴ − 2y⁴]/12
// and number-phase conjugations e^{iπ/2·n̂} that turn x̂ into p̂.
GateSequence compile_quartic_US(int K, int dim1, int dimc);

}  // namespace cvqml
