#pragma once
// End-to-end subroutines on truncated modes: amplitude encoding of classical
// vectors, reflection/marking primitives, quadrature-driven matrix inversion
// and eigenvalue distinguishing, and homodyne-only vector-distance estimation.
// Every subroutine returns a report whose residual entries compare the
// simulated object against the matching closed-form reference curve.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cvqml/channels.hpp"
#include "cvqml/dist.hpp"
#include "cvqml/fock.hpp"
#include "cvqml/measurement.hpp"
#include "cvqml/oracles.hpp"
#include "cvqml/rng.hpp"

namespace cvqml {

// ---------------------------------------------------------------------------
// Inputs and reports.
// ---------------------------------------------------------------------------

// A classical coefficient vector. When `normalized` is set the squared entries
// must sum to 1 within 1e−12 (validated by the consuming subroutine); an
// unflagged vector carries its length as data (the distance subroutine uses
// raw norms).
struct ClassicalVector {
  std::vector<cxd> entries;
  bool normalized = false;

  double norm() const;
  ClassicalVector unit() const;  // normalized copy with the flag set
};

// Common result plumbing: point estimates, the post-selection success
// probability where one applies, shot counts for sampled estimators, and
// named nonnegative residuals against the closed-form references.
struct SubroutineReport {
  std::vector<double> estimates;
  double success_probability = 1.0;
  long long shots = 0;
  std::vector<std::pair<std::string, double>> residuals;

  // Appends a residual; throws std::invalid_argument when `value` is negative.
  void push_residual(const std::string& name, double value);
  // Looks a residual up by name; throws std::out_of_range when absent.
  double residual(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Amplitude encoding.
// ---------------------------------------------------------------------------

// Multi-mode basis for encoding N amplitudes: index x is written in base `d`
// over `modes` digits (most significant digit on mode 0). The digit states
// are either the Fock levels |0⟩…|d−1⟩ of each mode, or — for the two-letter
// coherent alphabet — the pair {|α⟩, |−α⟩} embedded in a Fock cutoff of
// `coherent_dim` levels per mode.
struct EncodingBasis {
  enum class Kind { FockBasis, CoherentPair };
  Kind kind = Kind::FockBasis;
  int modes = 1;
  int d = 2;            // digit states per mode; CoherentPair requires d == 2
  cxd alpha{0.0, 0.0};  // CoherentPair amplitude
  int coherent_dim = 30;

  static EncodingBasis fock(int modes, int d);
  static EncodingBasis coherent_pair(int modes, cxd alpha, int coherent_dim = 30);

  std::size_t capacity() const;  // d^modes
};

// Encoded amplitude state plus the Gram matrix of the digit alphabet: the
// identity for Fock digits, and the ⟨±α|±α⟩ overlap matrix of the full
// product alphabet for the coherent pair, so callers can undo the
// non-orthogonality. Throws when the vector is longer than the capacity or
// is not normalized.
struct EncodedState {
  FockVector state;
  Mat gram;
};
EncodedState encode_vector(const ClassicalVector& a, const EncodingBasis& basis);

// Exact reflection I − 2|ψ₀⟩⟨ψ₀| about a normalized state, bound to all of
// its modes (Hermitian, unitary, involutive). Dense: ψ₀'s space must not
// exceed the embedding guard.
ModeOperator grover_reflection(const FockVector& psi0);

// Diagonal marker I + (e^{iφ} − 1)|x⟩⟨x| on the flat basis index x.
ModeOperator phase_mark(const FockCutoff& cutoff, std::size_t x, double phi);

// Coefficient-spread classification that separates vectors preparable with
// polylogarithmic effort from those needing amplitude amplification:
// PolyN_log when max|a_x| ≤ c/√N (default c = 2), else SqrtN.
enum class EncodingComplexity { PolyN_log, SqrtN };
EncodingComplexity encoding_complexity_class(const ClassicalVector& a,
                                             double c = 2.0);

// ---------------------------------------------------------------------------
// Quadrature-driven linear algebra.
// ---------------------------------------------------------------------------

// Which realization of the generator exponential drives the pipeline: the
// direct spectral exponential on the truncated space, or the channels
// module's copy-fed product-formula path.
enum class EvolutionPath { Direct, Trotter };

struct InversionOptions {
  double gamma = 1.0;
  double s = 1.0;    // resource squeezing: q-variance 1/(2s) per resource mode
  int resource_dim = 64;
  PostSelectionWindow window{0.0, 0.1};  // on the second resource quadrature
  EvolutionPath path = EvolutionPath::Direct;
  double trotter_epsilon = 0.05;         // step size for the Trotter path
};

// Outcome of one inversion run. The first resource quadrature is measured and
// its outcome recorded (not post-selected); the second is post-selected in
// the window. `solution` is the dominant eigenvector of the data register
// afterwards with `purity` its weight. Report residuals:
//   "infidelity_folded" — against the conditional solution Σ β_i A_i(q_R, 0)|e_i⟩
//                          predicted at the recorded outcome,
//   "infidelity_raw"    — against plain A⁻¹b (meaningful only near q_R ≈ 0),
//   "window_mass"       — post-selection success probability (also in
//                          report.success_probability).
struct InversionOutcome {
  FockVector solution;
  double purity = 0.0;
  double q_R = 0.0;
  SubroutineReport report;
};

// Inverts A on |b⟩ by coupling the data register to two squeezed resource
// modes through the doubly-conditional quadrature generator γ·A·p̂_R·p̂_S and
// measuring the resource quadratures. Throws when A is singular on the
// support of b, dims are inconsistent, or the post-selection window carries
// no mass.
InversionOutcome matrix_invert(const HermitianObservable& A,
                               const ClassicalVector& b,
                               const InversionOptions& opts, Rng& rng);

// Joint density of the two resource quadratures right before measurement —
// the object the closed-form conditional amplitude predicts. Grids must be
// uniform; the same grid is used on both axes.
Distribution2D inversion_joint_distribution(const HermitianObservable& A,
                                            const ClassicalVector& b,
                                            double gamma, double s,
                                            int resource_dim,
                                            const std::vector<double>& grid);

struct EigenOptions {
  double gamma = 1.0;
  double s = 1.0;
  int resource_dim = 64;
  EvolutionPath path = EvolutionPath::Direct;
  double trotter_epsilon = 0.05;
  std::vector<double> grid;  // homodyne grid; empty → automatic
};

// Eigenvalue read-out: the resource quadrature density after e^{iγ·A·K̂_R}
// develops one Gaussian peak of variance 1/(2s) at q = γλ_i per eigencomponent.
// `estimates` are the refined peak centers divided by γ (ascending);
// `resolvable` is false when some adjacent eigenvalue gap violates
// |γΔλ| ≥ 3/√(2s) (the peaks then overlap and the flag warns that estimates
// may merge). Report residuals:
//   "mixture_total_variation" — distance to the closed-form peak mixture,
//   "gap_margin"              — min adjacent |γΔλ|·√(2s)/3 (≥ 1 ⇔ resolvable).
struct EigenOutcome {
  Distribution1D distribution;
  std::vector<double> estimates;
  bool resolvable = true;
  SubroutineReport report;
};

EigenOutcome eigen_distinguish(const HermitianObservable& A,
                               const ClassicalVector& b,
                               const EigenOptions& opts);

// ---------------------------------------------------------------------------
// Vector distance by a homodyne-only swap test.
// ---------------------------------------------------------------------------

// Distance instance: D² = |u − (1/M)Σ v_i|², with the joint normalization
// 𝒩² = |u|² + (1/M)Σ|v_i|². Entries are raw (lengths carry data).
struct DistanceProblem {
  std::vector<cxd> u;
  std::vector<std::vector<cxd>> vs;

  int M() const { return static_cast<int>(vs.size()); }
  int N() const { return static_cast<int>(u.size()); }
};

// The assembled measurement circuit: an indexed superposition of u and the
// v_i entangled with an index mode, a reference mode holding the matching
// comparison state, two coherent test modes, and the dual-rail-driven
// quarter-turn exponential of the simultaneous (test-pair, index-reference)
// swap, followed by a 50:50 beamsplitter on the test modes. Building the
// dense controlled-swap factors is the expensive step, so the circuit is
// constructed once per geometry and reused across problems and β values.
class DistanceCircuit {
 public:
  // Geometry: M comparison vectors of length N, test modes of `test_dim`
  // Fock levels, index/reference modes of `index_dim` levels (0 → 2M+1; the
  // swap of the pair is exact only while its total occupancy fits the box,
  // so the register needs room for both labels at once, not just for M+1).
  DistanceCircuit(int M, int N, int test_dim = 30, int index_dim = 0);

  // Exact homodyne density of the first test quadrature phase component on a
  // symmetric grid, plus the closed-form facts of the instance. No sampling.
  struct Exact {
    Distribution1D pdf;
    double sign_difference = 0.0;   // measured P(p>0) − P(p<0)
    double reference = 0.0;         // closed-form −[e^{−β²/2}erfi(β/√2)]·D²/(2𝒩²)
    double unhalved_ratio = 0.0;    // measured / (−[…]·D²/𝒩²); ≈ ½ when faithful
    oracle::DistanceFacts facts;
  };
  Exact exact_distribution(const DistanceProblem& prob, double beta,
                           std::vector<double> grid = {}) const;

  // Monte-Carlo estimator from `shots` homodyne sign draws:
  //   D̂² = −2𝒩²·(f₊ − f₋)/[e^{−β²/2}erfi(β/√2)],
  // with its binomial standard error. Draw k uses rng.stream(k), so results
  // are reproducible under any shot-loop scheduling. Report residuals:
  //   "classical_gap"   — |D̂² − D²| against the classical value,
  //   "standard_error"  — the estimator's standard error.
  struct Estimate {
    double d2_hat = 0.0;
    double standard_error = 0.0;
    double f_plus = 0.0;
    double f_minus = 0.0;
    SubroutineReport report;
  };
  Estimate estimate(const DistanceProblem& prob, double beta, long long shots,
                    const Rng& rng) const;

  int test_dim() const { return test_dim_; }
  int index_dim() const { return index_dim_; }

 private:
  FockVector assemble(const DistanceProblem& prob, double beta) const;

  int M_, N_, test_dim_, index_dim_;
  FockCutoff cutoff_;
  ModeOperator swap_tests_;   // controlled swap of the test pair
  ModeOperator swap_index_;   // controlled swap of index/reference
  ModeOperator ancilla_turn_; // quarter rotation of the dual-rail pair
  ModeOperator splitter_;     // 50:50 beamsplitter on the test pair
};

// One-call convenience wrappers constructing a fresh circuit.
DistanceCircuit::Exact distance_exact_distribution(const DistanceProblem& prob,
                                                   double beta,
                                                   int test_dim = 30);
DistanceCircuit::Estimate distance_estimate(const DistanceProblem& prob,
                                            double beta, long long shots,
                                            const Rng& rng, int test_dim = 30);

}  // namespace cvqml
