#include "cvqml/channels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cvqml/gates.hpp"

namespace cvqml {

namespace {

void require_density(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument(std::string(what) + ": square matrix required");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(std::string(what) +
                                ": density matrix must be Hermitian");
  if (std::abs(m.trace().real() - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(what) +
                                ": density matrix must have unit trace");
}

// One gadget pass, reduced to Kraus operators on (data ⊗ resource) with the
// ancilla pair and the consumed copy traced out. `anc_plus` marks branches
// whose environment bra carries the ancilla pair in |+⟩, so the probability
// of finding the ancillas restored is the summed weight of those branches.
struct KrausSet {
  std::vector<Mat> ops;
  std::vector<bool> anc_plus;
};

// The gadget is CS · R(angles from hop ⊗ resource phase) · CS on modes
// (anc1, anc2, copy, data) ⊗ resource. Block-diagonalizing over the ancilla
// hop eigenbasis turns it into Σ_m G_m ⊗ E_m with G_m small (gadget modes)
// and E_m = res_exp(hop eigenvalue) on the resource register; Kraus operators
// follow by contracting G_m against the environment input |+⟩ ⊗ (copy
// eigenbranch) and an orthonormal environment output basis.
//
// The copy/data pair lives in internal boxes of size 2d−1: the swap chain is
// exact only on total-occupancy sectors the box fully contains, and inputs
// occupy up to d−1 quanta each. The channel maps the d-dimensional block to
// itself, so the returned Kraus operators are the (data < d) restriction.
KrausSet build_gadget_kraus(const Mat& copy,
                            const std::function<Mat(double)>& res_exp) {
  const int d = static_cast<int>(copy.rows());
  const int dbox = 2 * d - 1;
  FockCutoff lc({2, 2, dbox, dbox});
  const Mat cs = embed(controlled_swap(lc, 0, 2, 3), lc);

  const Mat hop = kron(a_op(2), adag_op(2)) + kron(adag_op(2), a_op(2));
  Eigen::SelfAdjointEigenSolver<Mat> eh(hop);
  Eigen::SelfAdjointEigenSolver<Mat> ec(copy);

  std::vector<Mat> g(4), e(4);
  for (int m = 0; m < 4; ++m) {
    const Vec v = eh.eigenvectors().col(m);
    const Mat pm = v * v.adjoint();
    g[m] = cs * embed(bind_op(lc, {0, 1}, pm, false), lc) * cs;
    e[m] = res_exp(eh.eigenvalues()(m));
  }

  const double rt = 1.0 / std::sqrt(2.0);
  std::vector<Vec> anc(4, Vec::Zero(4));
  anc[0] << 0.0, rt, rt, 0.0;   // |+⟩
  anc[1] << 0.0, rt, -rt, 0.0;  // |−⟩
  anc[2] << 1.0, 0.0, 0.0, 0.0;
  anc[3] << 0.0, 0.0, 0.0, 1.0;

  const Eigen::Index dres = e[0].rows();
  const Eigen::Index sys = d * dres;
  KrausSet out;
  for (int br = 0; br < d; ++br) {
    const double lam = ec.eigenvalues()(br);
    if (lam < 1e-14) continue;
    Vec w = Vec::Zero(dbox);
    w.head(d) = ec.eigenvectors().col(br);
    // M_m = G_m · (|+⟩ ⊗ w ⊗ I_data-box), shaped (gadget out) × data-box.
    std::vector<Mat> m1(4);
    for (int m = 0; m < 4; ++m) {
      m1[m] = Mat::Zero(4 * dbox * dbox, dbox);
      for (int ap = 1; ap <= 2; ++ap)
        for (int np = 0; np < d; ++np) {
          const cxd coef = anc[0](ap) * w(np);
          if (std::abs(coef) < 1e-16) continue;
          m1[m] += coef * g[m].middleCols((ap * dbox + np) * dbox, dbox);
        }
    }
    for (int ja = 0; ja < 4; ++ja)
      for (int nc = 0; nc < dbox; ++nc) {
        Mat k = Mat::Zero(sys, sys);
        for (int m = 0; m < 4; ++m) {
          Mat gd = Mat::Zero(dbox, dbox);
          for (int a = 0; a < 4; ++a) {
            const cxd coef = std::conj(anc[ja](a));
            if (std::abs(coef) < 1e-16) continue;
            gd += coef * m1[m].middleRows((a * dbox + nc) * dbox, dbox);
          }
          if (gd.cwiseAbs().maxCoeff() < 1e-16) continue;
          k += kron(Mat(gd.topLeftCorner(d, d)), e[m]);
        }
        k *= std::sqrt(lam);
        if (k.squaredNorm() < 1e-20) continue;  // unreachable env branch
        out.ops.push_back(std::move(k));
        out.anc_plus.push_back(ja == 0);
      }
  }

  // The set must resolve the identity: Σ K†K = I.
  Mat acc = Mat::Zero(sys, sys);
  for (const Mat& k : out.ops) acc += k.adjoint() * k;
  acc -= Mat::Identity(sys, sys);
  if (acc.cwiseAbs().maxCoeff() > 1e-9)
    throw std::logic_error(
        "internal: gadget Kraus decomposition fails completeness");
  return out;
}

double stream_angle(double total, double eps, int steps, int j) {
  const double sgn = (total >= 0.0) ? 1.0 : -1.0;
  if (j < steps - 1) return sgn * eps;
  return total - sgn * eps * (steps - 1);
}

DensityMatrix expA_impl(const TrotterPlan& plan, const HermitianObservable& A,
                        const DensityMatrix& state, TrotterResult* info,
                        bool two_resources) {
  if (!A.has_decomposition())
    throw std::invalid_argument(
        "Trotterized coupling needs an ensemble decomposition of A");
  const int want_modes = two_resources ? 3 : 2;
  if (state.cutoff.n_modes() != want_modes)
    throw std::invalid_argument(
        "state must carry exactly (data, resource...) modes");
  const int d = static_cast<int>(A.mat.rows());
  if (state.cutoff.dim(0) != d)
    throw std::invalid_argument("data register dimension mismatch");
  const int dr = state.cutoff.dim(1);
  const int ds = two_resources ? state.cutoff.dim(2) : 1;

  const bool has_sigma = A.sigma.has_value();
  const double t_rho = plan.gamma * (has_sigma ? 1.0 : A.rho_weight);
  const double t_sigma = has_sigma ? -plan.gamma : 0.0;

  TrotterResult res;
  if (t_rho == 0.0 && t_sigma == 0.0) {
    if (info) *info = res;
    return state;
  }
  if (!(plan.epsilon > 0.0))
    throw std::invalid_argument("per-step strength must be positive");
  const double span = std::max(std::abs(t_rho), std::abs(t_sigma));
  const double raw = std::ceil(span / plan.epsilon - 1e-12);
  if (raw > 200000.0)
    throw std::runtime_error("Trotter step count overflow (> 2e5 steps)");
  const int m = std::max(1, static_cast<int>(raw));
  res.steps = m;

  // Resource phase factory: e^{i·angle·λ·K̂} (single resource, K̂ = −p̂) or
  // e^{i·angle·λ·p̂⊗p̂} (two resources; the sign of K̂ squares away).
  Eigen::SelfAdjointEigenSolver<Mat> er(p_op(dr));
  Eigen::SelfAdjointEigenSolver<Mat> es =
      two_resources ? Eigen::SelfAdjointEigenSolver<Mat>(p_op(ds))
                    : Eigen::SelfAdjointEigenSolver<Mat>();
  const Mat w2 = two_resources ? kron(er.eigenvectors(), es.eigenvectors())
                               : er.eigenvectors();
  auto res_exp = [&](double angle, double lam) {
    const Eigen::Index n = w2.rows();
    Vec ph(n);
    if (two_resources) {
      Eigen::Index idx = 0;
      for (int kr = 0; kr < dr; ++kr)
        for (int ks = 0; ks < ds; ++ks, ++idx)
          ph(idx) = std::exp(
              cxd(0.0, angle * lam * er.eigenvalues()(kr) *
                           es.eigenvalues()(ks)));
    } else {
      for (int kr = 0; kr < dr; ++kr)
        ph(kr) = std::exp(cxd(0.0, -angle * lam * er.eigenvalues()(kr)));
    }
    return Mat(w2 * ph.asDiagonal() * w2.adjoint());
  };

  // Kraus sets per (stream, per-step angle); only two distinct angles occur
  // per stream (the regular step and the shortened final one).
  std::map<std::pair<int, double>, KrausSet> cache;
  auto set_for = [&](int stream, double angle) -> const KrausSet& {
    const auto key = std::make_pair(stream, angle);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const Mat& copy = (stream == 0) ? *A.rho : *A.sigma;
      it = cache
               .emplace(key, build_gadget_kraus(copy, [&](double lam) {
                          return res_exp(angle, lam);
                        }))
               .first;
    }
    return it->second;
  };

  DensityMatrix cur = state;
  for (int j = 0; j < m; ++j) {
    for (int stream = 0; stream < (has_sigma ? 2 : 1); ++stream) {
      const double total = (stream == 0) ? t_rho : t_sigma;
      if (total == 0.0) continue;
      const KrausSet& ks = set_for(stream, stream_angle(total, plan.epsilon,
                                                        m, j));
      Mat nxt = Mat::Zero(cur.mat.rows(), cur.mat.cols());
      double plus_p = 0.0;
      for (std::size_t k = 0; k < ks.ops.size(); ++k) {
        const Mat t = ks.ops[k] * cur.mat * ks.ops[k].adjoint();
        if (ks.anc_plus[k]) plus_p += t.trace().real();
        nxt += t;
      }
      const double tr = nxt.trace().real();
      cur.mat = std::move(nxt);
      res.min_ancilla_fidelity =
          std::min(res.min_ancilla_fidelity, plus_p / tr);
      if (stream == 0)
        ++res.copies_rho;
      else
        ++res.copies_sigma;
    }
  }

  const Mat gen = two_resources
                      ? kron(A.mat, kron(p_op(dr), p_op(ds)))
                      : kron(A.mat, translation_generator(dr));
  const Mat t = expi_hermitian(gen, plan.gamma);
  DensityMatrix tgt = state;
  tgt.mat = t * state.mat * t.adjoint();
  res.trace_distance_to_target = trace_distance(cur, tgt);
  if (info) *info = res;
  return cur;
}

}  // namespace

HermitianObservable observable_difference(const Mat& rho, const Mat& sigma) {
  require_density(rho, "observable_difference(rho)");
  require_density(sigma, "observable_difference(sigma)");
  if (rho.rows() != sigma.rows())
    throw std::invalid_argument("observable_difference: dimension mismatch");
  HermitianObservable a;
  a.mat = rho - sigma;
  a.rho = rho;
  a.sigma = sigma;
  a.rho_weight = 1.0;
  return a;
}

HermitianObservable observable_scaled_state(const Mat& rho, double weight) {
  require_density(rho, "observable_scaled_state");
  if (!(weight > 0.0))
    throw std::invalid_argument("observable_scaled_state: weight must be > 0");
  HermitianObservable a;
  a.mat = weight * rho;
  a.rho = rho;
  a.rho_weight = weight;
  return a;
}

DensityMatrix eswap_channel(const DensityMatrix& rho,
                            const DensityMatrix& rho_prime, double delta) {
  if (rho.cutoff != rho_prime.cutoff)
    throw std::invalid_argument("eswap_channel: dimension mismatch");
  const Eigen::Index d = rho.mat.rows();
  if (d > 64)
    throw std::invalid_argument(
        "eswap_channel: joint space too large to materialize");
  if (std::abs(rho.mat.trace().real() - 1.0) > 1e-6 ||
      std::abs(rho_prime.mat.trace().real() - 1.0) > 1e-6)
    throw std::invalid_argument("eswap_channel: inputs must be unit trace");

  const Mat x = kron(rho.mat, rho_prime.mat);
  const Eigen::Index n = d * d;
  // Row/column permutations by the register swap; e^{iδS} = cos·I + i sin·S
  // exactly, so the conjugated joint state assembles from four terms.
  auto swap_rows = [&](const Mat& in) {
    Mat out(n, n);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        out.row(i * d + j) = in.row(j * d + i);
    return out;
  };
  auto swap_cols = [&](const Mat& in) {
    Mat out(n, n);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        out.col(i * d + j) = in.col(j * d + i);
    return out;
  };
  const double c = std::cos(delta), s = std::sin(delta);
  const Mat sx = swap_rows(x);
  const Mat xs = swap_cols(x);
  const Mat sxs = swap_cols(sx);
  const Mat joint =
      c * c * x + s * s * sxs + cxd(0.0, s * c) * (sx - xs);

  std::vector<int> dims = rho.cutoff.dims();
  std::vector<int> keep;
  for (int i = 0; i < rho.cutoff.n_modes(); ++i) keep.push_back(i);
  for (int dd : rho_prime.cutoff.dims()) dims.push_back(dd);
  DensityMatrix full{FockCutoff(dims), joint, rho.renorm};
  DensityMatrix out = partial_trace(full, keep);
  out.renorm = rho.renorm;
  return out;
}

DensityMatrix expA_pR(const TrotterPlan& plan, const HermitianObservable& A,
                      const DensityMatrix& state, TrotterResult* info) {
  return expA_impl(plan, A, state, info, false);
}

DensityMatrix expA_pRpS(const TrotterPlan& plan, const HermitianObservable& A,
                        const DensityMatrix& state, TrotterResult* info) {
  return expA_impl(plan, A, state, info, true);
}

}  // namespace cvqml
