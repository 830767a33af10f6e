#pragma once
// Truncated multi-mode Fock-space states and operators.
//
// Conventions used throughout:
//   q = (a + a†)/√2,  p = (a − a†)/(i√2),  [q, p] = +i,
//   vacuum variance of q and of p is 1/2.
// The translation generator K = −p satisfies  e^{iθK} |q⟩-shift = +θ,
// i.e. exp(iθK) moves wavefunctions toward larger q by θ.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvqml {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Thrown when a state's amplitude mass near the truncation edge exceeds the
// configured tolerance and the policy is strict.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationPolicy {
  double threshold = 1e-6;  // allowed probability mass in each mode's top level
  bool strict = false;      // throw instead of recording
};

// Shape of a truncated multi-mode Fock space: per-mode dimensions and
// row-major strides (last listed mode is fastest-varying).
class FockCutoff {
 public:
  FockCutoff() = default;
  explicit FockCutoff(std::vector<int> dims, std::size_t max_total = (1u << 22));

  int n_modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const { return dims_.at(mode); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t total() const { return total_; }
  std::size_t stride(int mode) const { return strides_.at(mode); }

  std::size_t index(const std::vector<int>& occ) const;
  std::vector<int> occupancy(std::size_t index) const;

  bool operator==(const FockCutoff& other) const { return dims_ == other.dims_; }
  bool operator!=(const FockCutoff& other) const { return !(*this == other); }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

// Pure state on a truncated Fock space. `leakage` accumulates probability
// mass discarded by truncation bookkeeping (state constructors, edge checks);
// `renorm` tracks the product of success probabilities divided out by
// non-unitary maps (squared norm for pure states, trace for mixed ones).
struct FockVector {
  FockCutoff cutoff;
  Vec amps;
  double leakage = 0.0;
  double renorm = 1.0;

  double norm() const { return amps.norm(); }
};

// Mixed state. `renorm` has the same role as for FockVector (success
// probability factors divided out by non-unitary maps).
struct DensityMatrix {
  FockCutoff cutoff;
  Mat mat;
  double renorm = 1.0;

  double trace_real() const { return mat.trace().real(); }
};

// An operator acting on a listed subset of modes. `dims` are the per-listed-
// mode dimensions (row-major over the listed order); `mat` is d_op × d_op
// where d_op = ∏ dims. `unitary` marks maps that preserve norm; non-unitary
// applications renormalize and record the divided-out factor.
struct ModeOperator {
  std::vector<int> modes;
  std::vector<int> dims;
  Mat mat;
  bool unitary = true;

  std::size_t op_dim() const { return static_cast<std::size_t>(mat.rows()); }
  // Same matrix bound to a different set of modes.
  ModeOperator on(std::vector<int> new_modes) const;
};

// Convenience: build a ModeOperator whose per-mode dims are read off `cutoff`.
ModeOperator bind_op(const FockCutoff& cutoff, std::vector<int> modes, Mat mat,
                     bool unitary = true);

// ---- single-mode ladder / quadrature matrices --------------------------------
Mat a_op(int dim);
Mat adag_op(int dim);
Mat n_op(int dim);
Mat q_op(int dim);
Mat p_op(int dim);
// K = −p: exp(iθK) translates q by +θ.
Mat translation_generator(int dim);

// exp(i·scale·H) for Hermitian H via spectral decomposition. Throws
// std::invalid_argument if H is not Hermitian to within a tight tolerance.
Mat expi_hermitian(const Mat& H, double scale = 1.0);

// ---- state constructors ------------------------------------------------------
FockVector vacuum_state(FockCutoff cutoff);
FockVector basis_state(FockCutoff cutoff, const std::vector<int>& occ);

// Truncated single-mode coefficient vectors (NOT renormalized; the discarded
// tail shows up as a norm < 1).
Vec coherent_amplitudes(int dim, cxd alpha);
// Squeezed vacuum S(r)|0⟩ with S(r) = exp[ r(a² − a†²)/2 ]; r > 0 squeezes q.
Vec squeezed_vacuum_amplitudes(int dim, double r);
// Ancilla whose q-probability density is ∝ exp(−s·q²): squeezed vacuum with
// r = ln(s)/2, variance of q = 1/(2s), variance of p = s/2.
Vec gaussian_ancilla_amplitudes(int dim, double s);
// Even (sign=+1) / odd (sign=−1) superposition of |α⟩ and |−α⟩, normalized.
Vec cat_amplitudes(int dim, cxd alpha, int sign);

// ---- checked single-mode state factories -------------------------------------
// Each returns a normalized one-mode FockVector and accounts for the discarded
// continuum tail: under the default strict policy a tail above the threshold
// raises TruncationError (callers that knowingly accept truncation pass a lax
// policy); otherwise the tail is recorded as leakage.
inline constexpr TruncationPolicy kStrictFactoryPolicy{1e-6, true};

FockVector make_fock(int n, int dim);
FockVector make_coherent(cxd alpha, int dim,
                         const TruncationPolicy& policy = kStrictFactoryPolicy);
FockVector make_cat(cxd alpha, int sign, int dim,
                    const TruncationPolicy& policy = kStrictFactoryPolicy);
FockVector make_squeezed_ancilla(double s, int dim,
                                 const TruncationPolicy& policy = kStrictFactoryPolicy);

// Product state from per-mode coefficient vectors. Normalizes the result and
// records 1 − ∏‖cᵢ‖² as leakage.
FockVector product_state(FockCutoff cutoff, const std::vector<Vec>& mode_amps);
FockVector tensor(const FockVector& a, const FockVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix density_from(const FockVector& psi);

// ---- application machinery ---------------------------------------------------
void apply(FockVector& state, const ModeOperator& op);
void apply(DensityMatrix& rho, const ModeOperator& op);  // U ρ U† (K ρ K†/tr for non-unitary)

// Dense matrix of `op` embedded on the full space (guarded: total ≤ 4096).
Mat embed(const ModeOperator& op, const FockCutoff& cutoff);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
DensityMatrix partial_trace(const FockVector& psi, const std::vector<int>& keep);

// ---- diagnostics / measures --------------------------------------------------
cxd overlap(const FockVector& a, const FockVector& b);             // ⟨a|b⟩
double fidelity(const FockVector& a, const FockVector& b);         // |⟨a|b⟩|²
double fidelity(const DensityMatrix& rho, const FockVector& psi);  // ⟨ψ|ρ|ψ⟩
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);  // ½‖a−b‖₁
cxd expectation(const FockVector& state, const ModeOperator& op);
cxd expectation(const DensityMatrix& rho, const ModeOperator& op);

// Probability mass with occupation dims[mode]−1 in `mode` (truncation-edge
// diagnostic).
double top_level_mass(const FockVector& state, int mode);
double top_level_mass(const DensityMatrix& rho, int mode);
// Check every mode's edge mass against the policy; strict → throw, otherwise
// fold the worst edge mass into state.leakage (monotone max).
void check_truncation(FockVector& state, const TruncationPolicy& policy = {});

}  // namespace cvqml
