#include "cvqml/gates.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cvqml {

namespace {

constexpr double kPi = std::numbers::pi;

// a₁a₂† + a₁†a₂ on the (d1, d2) pair space.
Mat hop_generator(int d1, int d2) {
  return kron(a_op(d1), adag_op(d2)) + kron(adag_op(d1), a_op(d2));
}

// −i(a₁a₂† − a₁†a₂): Hermitian generator of the beamsplitter family.
Mat beamsplitter_generator(int d1, int d2) {
  return cxd(0.0, -1.0) *
         (kron(a_op(d1), adag_op(d2)) - kron(adag_op(d1), a_op(d2)));
}

Mat number_phase(int dim, double phi) {
  Mat d = Mat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n)
    d(n, n) = std::exp(cxd(0.0, phi * static_cast<double>(n)));
  return d;
}

void require_distinct(const std::vector<int>& modes, const char* what) {
  std::set<int> s(modes.begin(), modes.end());
  if (s.size() != modes.size())
    throw std::invalid_argument(std::string(what) +
                                ": mode indices must be distinct");
}

std::vector<Eigen::Index> low_subspace_indices(const FockCutoff& cutoff,
                                               const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != cutoff.n_modes())
    throw std::invalid_argument(
        "one subspace level count per mode is required");
  for (int m = 0; m < cutoff.n_modes(); ++m)
    if (levels[m] < 1 || levels[m] > cutoff.dim(m))
      throw std::invalid_argument("subspace levels outside [1, dim]");
  std::vector<Eigen::Index> sel;
  for (std::size_t idx = 0; idx < cutoff.total(); ++idx) {
    const auto occ = cutoff.occupancy(idx);
    bool in = true;
    for (int m = 0; m < cutoff.n_modes(); ++m)
      if (occ[m] >= levels[m]) {
        in = false;
        break;
      }
    if (in) sel.push_back(static_cast<Eigen::Index>(idx));
  }
  return sel;
}

Mat select_columns(const Mat& m, const std::vector<Eigen::Index>& sel) {
  Mat out(m.rows(), static_cast<Eigen::Index>(sel.size()));
  for (std::size_t j = 0; j < sel.size(); ++j) out.col(j) = m.col(sel[j]);
  return out;
}

Mat select_rows_cols(const Mat& m, const std::vector<Eigen::Index>& sel) {
  Mat out(sel.size(), sel.size());
  for (std::size_t i = 0; i < sel.size(); ++i)
    for (std::size_t j = 0; j < sel.size(); ++j) out(i, j) = m(sel[i], sel[j]);
  return out;
}

double spectral_norm(const Mat& m) {
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

}  // namespace

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ModeOperator rotation_R(const FockCutoff& cutoff, int m1, int m2,
                        double theta) {
  require_distinct({m1, m2}, "rotation_R");
  const int d1 = cutoff.dim(m1), d2 = cutoff.dim(m2);
  return bind_op(cutoff, {m1, m2},
                 expi_hermitian(hop_generator(d1, d2), theta), true);
}

ModeOperator beamsplitter_50_50(const FockCutoff& cutoff, int m1, int m2) {
  require_distinct({m1, m2}, "beamsplitter_50_50");
  const int d1 = cutoff.dim(m1), d2 = cutoff.dim(m2);
  return bind_op(cutoff, {m1, m2},
                 expi_hermitian(beamsplitter_generator(d1, d2), kPi / 4.0),
                 true);
}

ModeOperator controlled_swap(const FockCutoff& cutoff, int control, int c,
                             int cp) {
  require_distinct({control, c, cp}, "controlled_swap");
  const int dk = cutoff.dim(control), d = cutoff.dim(c);
  if (cutoff.dim(cp) != d)
    throw std::invalid_argument(
        "controlled_swap: swapped modes need equal dimensions");
  const Mat bs = expi_hermitian(beamsplitter_generator(d, d), kPi / 4.0);
  const Mat bs3 = kron(Mat::Identity(dk, dk), bs);
  Vec kerr(static_cast<Eigen::Index>(dk) * d * d);
  Eigen::Index idx = 0;
  for (int nk = 0; nk < dk; ++nk)
    for (int nc = 0; nc < d; ++nc)
      for (int ncp = 0; ncp < d; ++ncp, ++idx)
        kerr(idx) = std::exp(cxd(0.0, kPi * nk * nc));
  Mat u = bs3.adjoint() * kerr.asDiagonal() * bs3;
  return bind_op(cutoff, {control, c, cp}, std::move(u), true);
}

ModeOperator exp_swap(const FockCutoff& cutoff, double theta, int anc1,
                      int anc2, int c, int cp) {
  return exp_multi_swap(cutoff, theta, anc1, anc2, {{c, cp}});
}

ModeOperator exp_multi_swap(const FockCutoff& cutoff, double theta, int anc1,
                            int anc2,
                            const std::vector<std::pair<int, int>>& pairs) {
  if (pairs.empty())
    throw std::invalid_argument("exp_multi_swap: need at least one mode pair");
  std::vector<int> modes = {anc1, anc2};
  std::vector<int> dims = {cutoff.dim(anc1), cutoff.dim(anc2)};
  for (const auto& [c, cp] : pairs) {
    if (cutoff.dim(c) != cutoff.dim(cp))
      throw std::invalid_argument(
          "exp_multi_swap: swapped modes need equal dimensions");
    modes.push_back(c);
    modes.push_back(cp);
    dims.push_back(cutoff.dim(c));
    dims.push_back(cutoff.dim(cp));
  }
  require_distinct(modes, "exp_multi_swap");
  if (dims[0] < 2 || dims[1] < 2)
    throw std::invalid_argument(
        "exp_multi_swap: ancilla modes need at least two levels");
  FockCutoff local(dims);
  Mat cs = Mat::Identity(local.total(), local.total());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    cs = embed(controlled_swap(local, 0, 2 + 2 * static_cast<int>(i),
                               3 + 2 * static_cast<int>(i)),
               local) *
         cs;
  const Mat rot = embed(rotation_R(local, 0, 1, theta), local);
  Mat u = cs * rot * cs;
  return bind_op(cutoff, modes, std::move(u), true);
}

ModeOperator rotation_R_pR(const FockCutoff& cutoff, double delta, int m1,
                           int m2, int resource) {
  require_distinct({m1, m2, resource}, "rotation_R_pR");
  const int d1 = cutoff.dim(m1), d2 = cutoff.dim(m2), dr = cutoff.dim(resource);
  const std::size_t total =
      static_cast<std::size_t>(d1) * d2 * static_cast<std::size_t>(dr);
  if (total > 4096)
    throw std::invalid_argument(
        "rotation_R_pR: joint dimension too large to materialize densely");
  Eigen::SelfAdjointEigenSolver<Mat> eh(hop_generator(d1, d2));
  Eigen::SelfAdjointEigenSolver<Mat> ep(p_op(dr));
  Mat u = Mat::Zero(total, total);
  for (Eigen::Index j = 0; j < eh.eigenvalues().size(); ++j) {
    const Vec v = eh.eigenvectors().col(j);
    Vec ph(dr);
    for (int k = 0; k < dr; ++k)
      ph(k) = std::exp(cxd(0.0, delta * eh.eigenvalues()(j) *
                                    ep.eigenvalues()(k)));
    const Mat branch =
        ep.eigenvectors() * ph.asDiagonal() * ep.eigenvectors().adjoint();
    u += kron(v * v.adjoint(), branch);
  }
  return bind_op(cutoff, {m1, m2, resource}, std::move(u), true);
}

ModeOperator rotation_R_pRpS(const FockCutoff& cutoff, double gamma, int m1,
                             int m2, int r1, int r2) {
  require_distinct({m1, m2, r1, r2}, "rotation_R_pRpS");
  const int d1 = cutoff.dim(m1), d2 = cutoff.dim(m2);
  const int dr = cutoff.dim(r1), ds = cutoff.dim(r2);
  const std::size_t res = static_cast<std::size_t>(dr) * ds;
  const std::size_t total = static_cast<std::size_t>(d1) * d2 * res;
  if (total > 4096)
    throw std::invalid_argument(
        "rotation_R_pRpS: joint dimension too large to materialize densely");
  Eigen::SelfAdjointEigenSolver<Mat> eh(hop_generator(d1, d2));
  Eigen::SelfAdjointEigenSolver<Mat> er(p_op(dr));
  Eigen::SelfAdjointEigenSolver<Mat> es(p_op(ds));
  const Mat w2 = kron(er.eigenvectors(), es.eigenvectors());
  Mat u = Mat::Zero(total, total);
  for (Eigen::Index j = 0; j < eh.eigenvalues().size(); ++j) {
    const Vec v = eh.eigenvectors().col(j);
    Vec ph(static_cast<Eigen::Index>(res));
    Eigen::Index idx = 0;
    for (int kr = 0; kr < dr; ++kr)
      for (int ks = 0; ks < ds; ++ks, ++idx)
        ph(idx) = std::exp(cxd(0.0, gamma * eh.eigenvalues()(j) *
                                        er.eigenvalues()(kr) *
                                        es.eigenvalues()(ks)));
    const Mat branch = w2 * ph.asDiagonal() * w2.adjoint();
    u += kron(v * v.adjoint(), branch);
  }
  return bind_op(cutoff, {m1, m2, r1, r2}, std::move(u), true);
}

double dual_rail_leakage(const FockVector& state, int m1, int m2) {
  const auto& cut = state.cutoff;
  require_distinct({m1, m2}, "dual_rail_leakage");
  if (cut.dim(m1) < 2 || cut.dim(m2) < 2)
    throw std::invalid_argument(
        "dual_rail_leakage: modes need at least two levels");
  const std::size_t s1 = cut.stride(m1), s2 = cut.stride(m2);
  const int d1 = cut.dim(m1), d2 = cut.dim(m2);
  double in = 0.0, tot = 0.0;
  for (Eigen::Index idx = 0; idx < state.amps.size(); ++idx) {
    const double w = std::norm(state.amps(idx));
    tot += w;
    const int n1 = static_cast<int>((static_cast<std::size_t>(idx) / s1) % d1);
    const int n2 = static_cast<int>((static_cast<std::size_t>(idx) / s2) % d2);
    if ((n1 == 0 && n2 == 1) || (n1 == 1 && n2 == 0)) in += w;
  }
  if (!(tot > 1e-300))
    throw std::runtime_error("state carries no probability mass");
  return 1.0 - in / tot;
}

// ---- compiled sequences ------------------------------------------------------

Mat GateSequence::product() const {
  const auto total = static_cast<Eigen::Index>(cutoff.total());
  Mat acc = Mat::Identity(total, total);
  for (const auto& f : factors) acc = embed(f.op, cutoff) * acc;
  return acc;
}

Mat GateSequence::target_matrix() const {
  if (!target)
    throw std::logic_error("gate sequence has no reference target");
  return embed(*target, cutoff);
}

double GateSequence::renorm(const std::vector<int>& levels) const {
  const auto sel = low_subspace_indices(cutoff, levels);
  return spectral_norm(select_columns(product(), sel));
}

double GateSequence::error(const std::vector<int>& levels) const {
  const auto sel = low_subspace_indices(cutoff, levels);
  const Mat diff = product() - target_matrix();
  return spectral_norm(select_columns(diff, sel));
}

double GateSequence::unitarity_defect(const std::vector<int>& levels) const {
  const auto sel = low_subspace_indices(cutoff, levels);
  const Mat u = product();
  const double r = spectral_norm(select_columns(u, sel));
  Mat gram = u.adjoint() * u / (r * r);
  gram -= Mat::Identity(gram.rows(), gram.cols());
  return spectral_norm(select_rows_cols(gram, sel));
}

GateSequence compile_poly_phase(const PolyPhaseSpec& spec, int dim) {
  if (spec.K < 1)
    throw std::invalid_argument("compile_poly_phase: depth K must be >= 1");
  if (dim < 2)
    throw std::invalid_argument("compile_poly_phase: dim must be >= 2");
  GateSequence seq;
  seq.cutoff = FockCutoff({dim});
  seq.K = spec.K;

  int deg = -1;
  for (int j = static_cast<int>(spec.coeffs.size()) - 1; j >= 0; --j)
    if (spec.coeffs[j] != 0.0) {
      deg = j;
      break;
    }
  if (spec.gamma == 0.0 || deg < 0) {
    seq.target =
        bind_op(seq.cutoff, {0}, Mat::Identity(dim, dim), true);
    return seq;  // empty factor list: identity
  }
  if (deg < 3 || deg > 4)
    throw std::invalid_argument(
        "compile_poly_phase: polynomial order must be 3 or 4");

  const double g = spec.gamma / static_cast<double>(spec.K);
  // Q(z) = 1 + i·(γ/K)·P(z); |Q(0)| ≥ 1, so no root sits at the origin.
  std::vector<cxd> c(deg + 1, cxd(0.0, 0.0));
  c[0] = cxd(1.0, g * spec.coeffs[0]);
  for (int j = 1; j <= deg; ++j) c[j] = cxd(0.0, g * spec.coeffs[j]);

  Mat comp = Mat::Zero(deg, deg);
  for (int r = 1; r < deg; ++r) comp(r, r - 1) = 1.0;
  for (int r = 0; r < deg; ++r) comp(r, deg - 1) = -c[r] / c[deg];
  Eigen::ComplexEigenSolver<Mat> es(comp);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("compile_poly_phase: root finding failed");
  std::vector<cxd> roots(es.eigenvalues().data(),
                         es.eigenvalues().data() + deg);
  std::sort(roots.begin(), roots.end(), [](const cxd& a, const cxd& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const cxd& z : roots) {
    cxd q(0.0, 0.0);
    double scale = 0.0;
    cxd zp(1.0, 0.0);
    for (int j = 0; j <= deg; ++j, zp *= z) {
      q += c[j] * zp;
      scale += std::abs(c[j]) * std::abs(zp);
    }
    if (std::abs(q) > 1e-8 * std::max(1.0, scale)) {
      std::ostringstream msg;
      msg << "compile_poly_phase: root residuals too large:";
      for (const cxd& zz : roots) {
        cxd qq(0.0, 0.0);
        cxd zq(1.0, 0.0);
        for (int j = 0; j <= deg; ++j, zq *= zz) qq += c[j] * zq;
        msg << " |Q(" << zz.real() << (zz.imag() < 0 ? "-" : "+")
            << std::abs(zz.imag()) << "i)|=" << std::abs(qq);
      }
      throw std::runtime_error(msg.str());
    }
  }

  const Mat x = q_op(dim);
  const Mat eye = Mat::Identity(dim, dim);
  std::vector<CompiledFactor> block;
  for (int l = 0; l < deg; ++l) {
    const cxd gl = -1.0 / roots[static_cast<std::size_t>(l)];
    const cxd sc = (l == 0) ? c[0] : cxd(1.0, 0.0);
    Mat f = sc * (eye + gl * x);
    block.push_back({"linear_x",
                     {0},
                     {gl.real(), gl.imag(), sc.real(), sc.imag()},
                     bind_op(seq.cutoff, {0}, std::move(f), false)});
  }
  seq.factors.reserve(static_cast<std::size_t>(spec.K) * block.size());
  for (int k = 0; k < spec.K; ++k)
    for (const auto& f : block) seq.factors.push_back(f);

  Mat p = Mat::Zero(dim, dim);
  Mat xp = eye;
  for (int j = 0; j < static_cast<int>(spec.coeffs.size()); ++j) {
    if (spec.coeffs[j] != 0.0) p += spec.coeffs[j] * xp;
    xp = xp * x;
  }
  seq.target =
      bind_op(seq.cutoff, {0}, expi_hermitian(p, spec.gamma), true);
  return seq;
}

GateSequence compile_quartic_US(int K, int dim1, int dimc) {
  if (K < 1)
    throw std::invalid_argument("compile_quartic_US: depth K must be >= 1");
  if (dim1 < 2 || dimc < 2)
    throw std::invalid_argument("compile_quartic_US: dims must be >= 2");
  GateSequence seq;
  seq.cutoff = FockCutoff({dim1, dimc});
  seq.K = K;

  const double th_cross = kPi / (4.0 * K);
  const double th4 = th_cross / 12.0;

  const Mat x1 = q_op(dim1), xc = q_op(dimc);
  const Mat i1 = Mat::Identity(dim1, dim1), ic = Mat::Identity(dimc, dimc);

  auto quartic_single = [&](int mode, double th) {
    const Mat& x = (mode == 0) ? x1 : xc;
    const Mat x2 = x * x;
    return CompiledFactor{"quartic_phase",
                          {mode},
                          {th, 1.0},
                          bind_op(seq.cutoff, {mode},
                                  expi_hermitian(x2 * x2, th), true)};
  };
  auto quartic_sum = [&](double s1, double sc, double th) {
    const Mat m = s1 * kron(x1, ic) + sc * kron(i1, xc);
    const Mat m2 = m * m;
    return CompiledFactor{"quartic_phase",
                          {0, 1},
                          {th, s1, sc},
                          bind_op(seq.cutoff, {0, 1},
                                  expi_hermitian(m2 * m2, th), true)};
  };
  auto phase = [&](int mode, double phi) {
    const int d = (mode == 0) ? dim1 : dimc;
    return CompiledFactor{"mode_phase",
                          {mode},
                          {phi},
                          bind_op(seq.cutoff, {mode}, number_phase(d, phi),
                                  true)};
  };

  // The x̂₁²x̂_c² chain: polarization identity, all four factors commuting.
  const std::vector<CompiledFactor> chain = {
      quartic_sum(1.0, 1.0, th4), quartic_sum(1.0, -1.0, th4),
      quartic_single(0, -2.0 * th4), quartic_single(1, -2.0 * th4)};

  std::vector<CompiledFactor> step;
  auto add_chain = [&] {
    for (const auto& f : chain) step.push_back(f);
  };
  // q²q²
  add_chain();
  // q²p²: conjugate the chain by the number phase on mode c.
  step.push_back(phase(1, -kPi / 2.0));
  add_chain();
  step.push_back(phase(1, kPi / 2.0));
  // p²q²
  step.push_back(phase(0, -kPi / 2.0));
  add_chain();
  step.push_back(phase(0, kPi / 2.0));
  // p²p²
  step.push_back(phase(0, -kPi / 2.0));
  step.push_back(phase(1, -kPi / 2.0));
  add_chain();
  step.push_back(phase(1, kPi / 2.0));
  step.push_back(phase(0, kPi / 2.0));

  seq.factors.reserve(static_cast<std::size_t>(K) * step.size());
  for (int k = 0; k < K; ++k)
    for (const auto& f : step) seq.factors.push_back(f);

  // Reference: e^{iπH₁H_c} is diagonal with phases π(n+½)(m+½).
  Vec diag(static_cast<Eigen::Index>(dim1) * dimc);
  Eigen::Index idx = 0;
  for (int n = 0; n < dim1; ++n)
    for (int m = 0; m < dimc; ++m, ++idx)
      diag(idx) = std::exp(cxd(0.0, kPi * (n + 0.5) * (m + 0.5)));
  seq.target = bind_op(seq.cutoff, {0, 1}, Mat(diag.asDiagonal()), true);
  return seq;
}

}  // namespace cvqml
