#include "cvqml/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cvqml {

namespace {

// Enumerate the flat base offsets of every occupation of `modes` (listed
// order, row-major: last listed mode fastest).
std::vector<std::size_t> offsets_of(const FockCutoff& cutoff,
                                    const std::vector<int>& modes) {
  std::size_t count = 1;
  for (int m : modes) count *= static_cast<std::size_t>(cutoff.dim(m));
  std::vector<std::size_t> out(count, 0);
  if (modes.empty()) return out;
  std::vector<int> occ(modes.size(), 0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t off = 0;
    for (std::size_t t = 0; t < modes.size(); ++t)
      off += static_cast<std::size_t>(occ[t]) * cutoff.stride(modes[t]);
    out[k] = off;
    for (int t = static_cast<int>(modes.size()) - 1; t >= 0; --t) {
      if (++occ[t] < cutoff.dim(modes[t])) break;
      occ[t] = 0;
    }
  }
  return out;
}

std::vector<int> complement_modes(const FockCutoff& cutoff,
                                  const std::vector<int>& modes) {
  std::vector<bool> used(cutoff.n_modes(), false);
  for (int m : modes) used.at(m) = true;
  std::vector<int> rest;
  for (int m = 0; m < cutoff.n_modes(); ++m)
    if (!used[m]) rest.push_back(m);
  return rest;
}

void validate_op(const FockCutoff& cutoff, const ModeOperator& op) {
  if (op.modes.size() != op.dims.size())
    throw std::invalid_argument("operator modes/dims length mismatch");
  if (op.mat.rows() != op.mat.cols())
    throw std::invalid_argument("operator matrix is not square");
  std::size_t d = 1;
  for (int x : op.dims) d *= static_cast<std::size_t>(x);
  if (d != static_cast<std::size_t>(op.mat.rows()))
    throw std::invalid_argument("operator matrix size does not match dims");
  std::vector<int> sorted = op.modes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("operator lists a mode twice");
  for (std::size_t t = 0; t < op.modes.size(); ++t) {
    int m = op.modes[t];
    if (m < 0 || m >= cutoff.n_modes())
      throw std::invalid_argument("operator mode out of range");
    if (cutoff.dim(m) != op.dims[t])
      throw std::invalid_argument("operator dim mismatch on mode " +
                                  std::to_string(m));
  }
}

// Y = (op ⊗ 1_rest) · X applied in place on the row index of X.
void row_apply(const FockCutoff& cutoff, const ModeOperator& op, Mat& X) {
  const std::size_t d_op = op.op_dim();
  const auto op_off = offsets_of(cutoff, op.modes);
  const auto rest_off = offsets_of(cutoff, complement_modes(cutoff, op.modes));
  const Eigen::Index cols = X.cols();
  Mat G(d_op, cols);
  for (std::size_t r = 0; r < rest_off.size(); ++r) {
    for (std::size_t j = 0; j < d_op; ++j)
      G.row(j) = X.row(static_cast<Eigen::Index>(op_off[j] + rest_off[r]));
    Mat C = op.mat * G;
    for (std::size_t j = 0; j < d_op; ++j)
      X.row(static_cast<Eigen::Index>(op_off[j] + rest_off[r])) = C.row(j);
  }
}

}  // namespace

// ---- FockCutoff --------------------------------------------------------------

FockCutoff::FockCutoff(std::vector<int> dims, std::size_t max_total)
    : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("cutoff needs at least one mode");
  for (int d : dims_)
    if (d < 1) throw std::invalid_argument("mode dimension must be >= 1");
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (int m = static_cast<int>(dims_.size()) - 1; m >= 0; --m) {
    strides_[m] = total_;
    total_ *= static_cast<std::size_t>(dims_[m]);
    if (total_ > max_total)
      throw std::invalid_argument("truncated space exceeds size cap");
  }
}

std::size_t FockCutoff::index(const std::vector<int>& occ) const {
  if (occ.size() != dims_.size())
    throw std::invalid_argument("occupation length mismatch");
  std::size_t idx = 0;
  for (std::size_t m = 0; m < occ.size(); ++m) {
    if (occ[m] < 0 || occ[m] >= dims_[m])
      throw std::invalid_argument("occupation out of range");
    idx += static_cast<std::size_t>(occ[m]) * strides_[m];
  }
  return idx;
}

std::vector<int> FockCutoff::occupancy(std::size_t index) const {
  if (index >= total_) throw std::invalid_argument("index out of range");
  std::vector<int> occ(dims_.size());
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    occ[m] = static_cast<int>(index / strides_[m]);
    index %= strides_[m];
  }
  return occ;
}

// ---- ModeOperator ------------------------------------------------------------

ModeOperator ModeOperator::on(std::vector<int> new_modes) const {
  if (new_modes.size() != modes.size())
    throw std::invalid_argument("rebinding changes the number of modes");
  ModeOperator out = *this;
  out.modes = std::move(new_modes);
  return out;
}

ModeOperator bind_op(const FockCutoff& cutoff, std::vector<int> modes, Mat mat,
                     bool unitary) {
  ModeOperator op;
  op.dims.reserve(modes.size());
  for (int m : modes) op.dims.push_back(cutoff.dim(m));
  op.modes = std::move(modes);
  op.mat = std::move(mat);
  op.unitary = unitary;
  validate_op(cutoff, op);
  // The unitary flag suppresses renormalization bookkeeping downstream, so a
  // mislabeled matrix silently corrupts probabilities; verify it while the
  // Gram product is still cheap.
  if (op.unitary && op.op_dim() <= 256) {
    const Eigen::Index d = op.mat.rows();
    const double err =
        (op.mat.adjoint() * op.mat - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > 1e-9)
      throw std::invalid_argument(
          "operator marked unitary fails U†U = I within 1e-9");
  }
  return op;
}

// ---- single-mode matrices ----------------------------------------------------

Mat a_op(int dim) {
  Mat m = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(double(n));
  return m;
}

Mat adag_op(int dim) { return a_op(dim).adjoint(); }

Mat n_op(int dim) {
  Mat m = Mat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = double(n);
  return m;
}

Mat q_op(int dim) {
  return (a_op(dim) + adag_op(dim)) / std::sqrt(2.0);
}

Mat p_op(int dim) {
  return (a_op(dim) - adag_op(dim)) * cxd(0.0, -1.0 / std::sqrt(2.0));
}

Mat translation_generator(int dim) { return -p_op(dim); }

Mat expi_hermitian(const Mat& H, double scale) {
  const double mag = H.cwiseAbs().maxCoeff();
  const double herm_err = (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-10 * (1.0 + mag))
    throw std::invalid_argument("generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const RVec& lam = es.eigenvalues();
  Vec phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    phases(k) = std::exp(cxd(0.0, scale * lam(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// ---- state constructors ------------------------------------------------------

FockVector vacuum_state(FockCutoff cutoff) {
  FockVector st;
  st.amps = Vec::Zero(static_cast<Eigen::Index>(cutoff.total()));
  st.amps(0) = 1.0;
  st.cutoff = std::move(cutoff);
  return st;
}

FockVector basis_state(FockCutoff cutoff, const std::vector<int>& occ) {
  FockVector st;
  st.amps = Vec::Zero(static_cast<Eigen::Index>(cutoff.total()));
  st.amps(static_cast<Eigen::Index>(cutoff.index(occ))) = 1.0;
  st.cutoff = std::move(cutoff);
  return st;
}

Vec coherent_amplitudes(int dim, cxd alpha) {
  Vec c(dim);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  return c;
}

Vec squeezed_vacuum_amplitudes(int dim, double r) {
  Vec c = Vec::Zero(dim);
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  const double t = -std::tanh(r);
  for (int n = 1; 2 * n < dim; ++n)
    c(2 * n) = c(2 * n - 2) * t * std::sqrt((2.0 * n - 1.0) / (2.0 * n));
  return c;
}

Vec gaussian_ancilla_amplitudes(int dim, double s) {
  if (s <= 0) throw std::invalid_argument("width parameter must be positive");
  return squeezed_vacuum_amplitudes(dim, 0.5 * std::log(s));
}

Vec cat_amplitudes(int dim, cxd alpha, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be ±1");
  Vec c = coherent_amplitudes(dim, alpha) +
          double(sign) * coherent_amplitudes(dim, -alpha);
  const double nrm = c.norm();
  if (nrm < 1e-300) throw std::invalid_argument("cat state has vanishing norm");
  return c / nrm;
}

namespace {
// Wrap a truncated single-mode amplitude vector whose continuum completion is
// unit-norm: the missing squared norm is the discarded tail.
FockVector one_mode_state(Vec amps, const TruncationPolicy& policy,
                          const char* what) {
  const double kept = amps.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept);
  if (policy.strict && tail > policy.threshold)
    throw TruncationError(std::string(what) + ": discarded tail mass " +
                          std::to_string(tail) + " exceeds threshold " +
                          std::to_string(policy.threshold) +
                          "; raise dim or pass a lax policy");
  if (kept < 1e-300)
    throw std::invalid_argument(std::string(what) + " has vanishing norm");
  FockVector st;
  st.cutoff = FockCutoff({static_cast<int>(amps.size())});
  st.amps = amps / std::sqrt(kept);
  st.leakage = tail;
  return st;
}
}  // namespace

FockVector make_fock(int n, int dim) {
  if (n < 0 || n >= dim)
    throw std::out_of_range("occupation outside the truncated mode");
  return basis_state(FockCutoff({dim}), {n});
}

FockVector make_coherent(cxd alpha, int dim, const TruncationPolicy& policy) {
  return one_mode_state(coherent_amplitudes(dim, alpha), policy, "coherent state");
}

FockVector make_cat(cxd alpha, int sign, int dim, const TruncationPolicy& policy) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be ±1");
  // Continuum normalization ‖|α⟩ + sign·|−α⟩‖² = 2 + 2·sign·e^{−2|α|²}.
  const double nrm2 = 2.0 + 2.0 * sign * std::exp(-2.0 * std::norm(alpha));
  if (nrm2 < 1e-300)
    throw std::invalid_argument("cat state has vanishing norm");
  Vec c = (coherent_amplitudes(dim, alpha) +
           double(sign) * coherent_amplitudes(dim, -alpha)) /
          std::sqrt(nrm2);
  return one_mode_state(std::move(c), policy, "cat state");
}

FockVector make_squeezed_ancilla(double s, int dim, const TruncationPolicy& policy) {
  return one_mode_state(gaussian_ancilla_amplitudes(dim, s), policy,
                        "squeezed ancilla");
}

FockVector product_state(FockCutoff cutoff, const std::vector<Vec>& mode_amps) {
  if (static_cast<int>(mode_amps.size()) != cutoff.n_modes())
    throw std::invalid_argument("one amplitude vector per mode required");
  double prob_kept = 1.0;
  for (int m = 0; m < cutoff.n_modes(); ++m) {
    if (mode_amps[m].size() != cutoff.dim(m))
      throw std::invalid_argument("mode amplitude length mismatch");
    prob_kept *= mode_amps[m].squaredNorm();
  }
  if (prob_kept < 1e-300)
    throw std::invalid_argument("product state has vanishing norm");
  FockVector st;
  st.amps = Vec::Ones(1);
  for (int m = 0; m < cutoff.n_modes(); ++m) {
    Vec next(st.amps.size() * mode_amps[m].size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < st.amps.size(); ++i)
      for (Eigen::Index j = 0; j < mode_amps[m].size(); ++j)
        next(k++) = st.amps(i) * mode_amps[m](j);
    st.amps = std::move(next);
  }
  st.amps /= std::sqrt(prob_kept);
  st.leakage = 1.0 - prob_kept;
  st.cutoff = std::move(cutoff);
  return st;
}

FockVector tensor(const FockVector& a, const FockVector& b) {
  std::vector<int> dims = a.cutoff.dims();
  dims.insert(dims.end(), b.cutoff.dims().begin(), b.cutoff.dims().end());
  FockVector st;
  st.cutoff = FockCutoff(dims);
  st.amps = Vec(st.cutoff.total());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < a.amps.size(); ++i)
    for (Eigen::Index j = 0; j < b.amps.size(); ++j)
      st.amps(k++) = a.amps(i) * b.amps(j);
  st.leakage = a.leakage + b.leakage;
  st.renorm = a.renorm * b.renorm;
  return st;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.cutoff.dims();
  dims.insert(dims.end(), b.cutoff.dims().begin(), b.cutoff.dims().end());
  DensityMatrix out;
  out.cutoff = FockCutoff(dims);
  const Eigen::Index na = a.mat.rows(), nb = b.mat.rows();
  out.mat = Mat(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j)
      out.mat.block(i * nb, j * nb, nb, nb) = a.mat(i, j) * b.mat;
  out.renorm = a.renorm * b.renorm;
  return out;
}

DensityMatrix density_from(const FockVector& psi) {
  DensityMatrix rho;
  rho.cutoff = psi.cutoff;
  rho.mat = psi.amps * psi.amps.adjoint();
  rho.renorm = psi.renorm;
  return rho;
}

// ---- application -------------------------------------------------------------

void apply(FockVector& state, const ModeOperator& op) {
  validate_op(state.cutoff, op);
  const std::size_t d_op = op.op_dim();
  const auto op_off = offsets_of(state.cutoff, op.modes);
  const auto rest_off =
      offsets_of(state.cutoff, complement_modes(state.cutoff, op.modes));
  const std::size_t R = rest_off.size();
  Mat B(d_op, R);
  for (std::size_t j = 0; j < d_op; ++j)
    for (std::size_t r = 0; r < R; ++r)
      B(j, r) = state.amps(static_cast<Eigen::Index>(op_off[j] + rest_off[r]));
  Mat C = op.mat * B;
  for (std::size_t j = 0; j < d_op; ++j)
    for (std::size_t r = 0; r < R; ++r)
      state.amps(static_cast<Eigen::Index>(op_off[j] + rest_off[r])) = C(j, r);
  if (!op.unitary) {
    const double p = state.amps.squaredNorm();
    if (p < 1e-300)
      throw std::runtime_error("post-selection annihilated the state");
    state.amps /= std::sqrt(p);
    state.renorm *= p;
  }
}

void apply(DensityMatrix& rho, const ModeOperator& op) {
  validate_op(rho.cutoff, op);
  row_apply(rho.cutoff, op, rho.mat);   // A = K ρ
  Mat adj = rho.mat.adjoint();
  row_apply(rho.cutoff, op, adj);       // K A† = K ρ† K†† → (K (Kρ)†)† = K ρ K†
  rho.mat = adj.adjoint();
  if (!op.unitary) {
    const double p = rho.mat.trace().real();
    if (p < 1e-300)
      throw std::runtime_error("post-selection annihilated the state");
    rho.mat /= p;
    rho.renorm *= p;
  }
}

Mat embed(const ModeOperator& op, const FockCutoff& cutoff) {
  validate_op(cutoff, op);
  if (cutoff.total() > 4096)
    throw std::invalid_argument("embed() limited to total dimension 4096");
  const std::size_t d_op = op.op_dim();
  const auto op_off = offsets_of(cutoff, op.modes);
  const auto rest_off = offsets_of(cutoff, complement_modes(cutoff, op.modes));
  Mat E = Mat::Zero(cutoff.total(), cutoff.total());
  for (std::size_t r = 0; r < rest_off.size(); ++r)
    for (std::size_t j = 0; j < d_op; ++j)
      for (std::size_t k = 0; k < d_op; ++k)
        E(static_cast<Eigen::Index>(op_off[j] + rest_off[r]),
          static_cast<Eigen::Index>(op_off[k] + rest_off[r])) = op.mat(j, k);
  return E;
}

// ---- partial traces ----------------------------------------------------------

namespace {
void check_keep(const FockCutoff& cutoff, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("keep list must be non-empty");
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("keep lists a mode twice");
  for (int m : keep)
    if (m < 0 || m >= cutoff.n_modes())
      throw std::invalid_argument("keep mode out of range");
}
}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  check_keep(rho.cutoff, keep);
  const auto keep_off = offsets_of(rho.cutoff, keep);
  const auto tr_off = offsets_of(rho.cutoff, complement_modes(rho.cutoff, keep));
  std::vector<int> kd;
  for (int m : keep) kd.push_back(rho.cutoff.dim(m));
  DensityMatrix out;
  out.cutoff = FockCutoff(kd);
  out.renorm = rho.renorm;
  const std::size_t K = keep_off.size();
  out.mat = Mat::Zero(K, K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t l = 0; l < K; ++l) {
      cxd acc = 0.0;
      for (std::size_t t : tr_off)
        acc += rho.mat(static_cast<Eigen::Index>(keep_off[k] + t),
                       static_cast<Eigen::Index>(keep_off[l] + t));
      out.mat(k, l) = acc;
    }
  return out;
}

DensityMatrix partial_trace(const FockVector& psi, const std::vector<int>& keep) {
  check_keep(psi.cutoff, keep);
  const auto keep_off = offsets_of(psi.cutoff, keep);
  const auto tr_off = offsets_of(psi.cutoff, complement_modes(psi.cutoff, keep));
  std::vector<int> kd;
  for (int m : keep) kd.push_back(psi.cutoff.dim(m));
  const std::size_t K = keep_off.size(), T = tr_off.size();
  Mat G(K, T);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t t = 0; t < T; ++t)
      G(k, t) = psi.amps(static_cast<Eigen::Index>(keep_off[k] + tr_off[t]));
  DensityMatrix out;
  out.cutoff = FockCutoff(kd);
  out.mat = G * G.adjoint();
  out.renorm = psi.renorm;
  return out;
}

// ---- measures ----------------------------------------------------------------

cxd overlap(const FockVector& a, const FockVector& b) {
  if (a.cutoff != b.cutoff) throw std::invalid_argument("cutoff mismatch");
  return a.amps.dot(b.amps);  // Eigen dot conjugates the left argument
}

double fidelity(const FockVector& a, const FockVector& b) {
  return std::norm(overlap(a, b));
}

double fidelity(const DensityMatrix& rho, const FockVector& psi) {
  if (rho.cutoff != psi.cutoff) throw std::invalid_argument("cutoff mismatch");
  return std::real(psi.amps.dot(rho.mat * psi.amps));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.cutoff != b.cutoff) throw std::invalid_argument("cutoff mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(a.mat - b.mat);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

cxd expectation(const FockVector& state, const ModeOperator& op) {
  FockVector tmp = state;
  ModeOperator safe = op;
  safe.unitary = true;  // suppress renormalization; we want ⟨ψ|M|ψ⟩ as-is
  apply(tmp, safe);
  return state.amps.dot(tmp.amps);
}

cxd expectation(const DensityMatrix& rho, const ModeOperator& op) {
  validate_op(rho.cutoff, op);
  Mat X = rho.mat;
  row_apply(rho.cutoff, op, X);  // M ρ
  return X.trace();
}

// ---- truncation diagnostics --------------------------------------------------

namespace {
template <typename WeightFn>
double edge_mass(const FockCutoff& cutoff, int mode, WeightFn&& w) {
  const std::size_t top =
      static_cast<std::size_t>(cutoff.dim(mode) - 1) * cutoff.stride(mode);
  const auto rest_off = offsets_of(cutoff, complement_modes(cutoff, {mode}));
  double mass = 0.0;
  for (std::size_t r : rest_off) mass += w(top + r);
  return mass;
}
}  // namespace

double top_level_mass(const FockVector& state, int mode) {
  if (mode < 0 || mode >= state.cutoff.n_modes())
    throw std::invalid_argument("mode out of range");
  return edge_mass(state.cutoff, mode, [&](std::size_t i) {
    return std::norm(state.amps(static_cast<Eigen::Index>(i)));
  });
}

double top_level_mass(const DensityMatrix& rho, int mode) {
  if (mode < 0 || mode >= rho.cutoff.n_modes())
    throw std::invalid_argument("mode out of range");
  return edge_mass(rho.cutoff, mode, [&](std::size_t i) {
    return std::real(rho.mat(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(i)));
  });
}

void check_truncation(FockVector& state, const TruncationPolicy& policy) {
  double worst = 0.0;
  int worst_mode = 0;
  for (int m = 0; m < state.cutoff.n_modes(); ++m) {
    const double mass = top_level_mass(state, m);
    if (mass > worst) {
      worst = mass;
      worst_mode = m;
    }
  }
  if (worst > policy.threshold && policy.strict)
    throw TruncationError("truncation-edge mass " + std::to_string(worst) +
                          " on mode " + std::to_string(worst_mode) +
                          " exceeds threshold " +
                          std::to_string(policy.threshold));
  state.leakage = std::max(state.leakage, worst);
}

}  // namespace cvqml
