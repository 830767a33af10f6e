#pragma once
// Mixed-state machinery: the exponential-swap channel and the Trotterized
// realization of data-register translation couplings e^{iγA⊗K̂} driven by
// ensemble copies of the states that make up A. Each Trotter step spends one
// fresh copy per stream and runs the dual-rail-ancilla gadget (controlled
// swap, resource-conditioned ancilla rotation, controlled swap); the
// environment (ancillas + copy) is then traced out exactly via a Kraus
// decomposition, so no sampling error enters — only the advertised O(ε)
// Trotter error.

#include <optional>

#include "cvqml/fock.hpp"

namespace cvqml {

// Hermitian generator on the data register together with the ensemble
// decomposition that drives its Trotterization: either A = ρ − σ (two
// unit-trace streams with opposite rotation signs) or A = w·ρ (one stream,
// w > 0). Build through the factories below; they enforce Hermiticity and
// decomposition consistency at 1e-10.
struct HermitianObservable {
  Mat mat;                  // Hermitian matrix on the data register
  std::optional<Mat> rho;   // copy state consumed by forward steps
  std::optional<Mat> sigma; // copy state consumed by backward steps
  double rho_weight = 1.0;  // strength multiplier for the single-stream form

  bool has_decomposition() const { return rho.has_value(); }
};

// A = ρ − σ with both factors unit-trace density matrices.
HermitianObservable observable_difference(const Mat& rho, const Mat& sigma);
// A = weight·ρ with ρ a unit-trace density matrix and weight > 0.
HermitianObservable observable_scaled_state(const Mat& rho, double weight);

// Total generator strength and per-step strength. The step count is
// ⌈strength/ε⌉ per stream (strength = γ for a difference decomposition,
// γ·weight for the single-stream form) with the final step shortened so the
// angles sum exactly to the total.
struct TrotterPlan {
  double gamma = 0.0;
  double epsilon = 0.1;
};

// Bookkeeping from a Trotterized application.
struct TrotterResult {
  int steps = 0;
  int copies_rho = 0;
  int copies_sigma = 0;
  // Dual-rail ancilla pair's overlap with |+⟩ after each gadget pass (worst
  // pass reported); the construction restores the ancillas exactly, so this
  // sits at 1 up to roundoff.
  double min_ancilla_fidelity = 1.0;
  // Trace distance of the output to the directly exponentiated target
  // conjugation applied to the same input.
  double trace_distance_to_target = 0.0;
};

// Exact exponential-swap channel: apply e^{iδS} (S = swap) to ρ ⊗ ρ′ and
// trace out the second factor. Equals conjugation of ρ by e^{iδρ′} up to
// O(δ²). Both inputs need matching cutoffs and unit trace.
DensityMatrix eswap_channel(const DensityMatrix& rho,
                            const DensityMatrix& rho_prime, double delta);

// Trotterized e^{iγA⊗K̂_R} conjugation on a (data, resource) state, K̂ the
// resource translation generator. state.cutoff must be exactly
// {data dim, resource dim} with the data dim matching A. Throws
// std::invalid_argument when A lacks a decomposition and
// std::runtime_error when the plan needs an absurd number of steps.
DensityMatrix expA_pR(const TrotterPlan& plan, const HermitianObservable& A,
                      const DensityMatrix& state,
                      TrotterResult* info = nullptr);

// Same construction against the two-resource coupling e^{iγA⊗K̂_R⊗K̂_S}
// (equal to A⊗p̂⊗p̂ since the translation generators' signs cancel).
// state.cutoff must be {data dim, resource dim, resource dim}.
DensityMatrix expA_pRpS(const TrotterPlan& plan, const HermitianObservable& A,
                        const DensityMatrix& state,
                        TrotterResult* info = nullptr);

}  // namespace cvqml
