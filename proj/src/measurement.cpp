#include "cvqml/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cvqml {

namespace {

constexpr double kInvQuarterRootPi = 0.7511255444649425;  // π^{−1/4}

// diag((−i)^n): momentum-representation phases, ⟨p|n⟩ = (−i)^n·φ_n(p).
Mat momentum_phases(int dim) {
  Mat d = Mat::Zero(dim, dim);
  cxd f(1.0, 0.0);
  for (int n = 0; n < dim; ++n, f *= cxd(0.0, -1.0)) d(n, n) = f;
  return d;
}

DensityMatrix reduce_mode(const DensityMatrix& rho, int mode) {
  if (rho.cutoff.n_modes() == 1) {
    if (mode != 0) throw std::out_of_range("mode index out of range");
    return rho;
  }
  return partial_trace(rho, {mode});
}

// Shared tail: given the per-point density on `grid`, enforce the mass
// contract and normalize.
Distribution1D finish_density(std::vector<double> grid,
                              std::vector<double> density) {
  Distribution1D out;
  out.step = grid[1] - grid[0];
  out.density = std::move(density);
  out.grid = std::move(grid);
  const double mass = out.total_mass();
  if (std::abs(mass - 1.0) > 1e-3)
    throw std::runtime_error(
        "homodyne grid misses probability mass beyond 1e-3; widen the grid");
  out.normalize();
  return out;
}

std::vector<double> default_grid(double mean, double m2) {
  const double sd = std::sqrt(std::max(1e-12, m2 - mean * mean));
  return uniform_grid(mean - 8.0 * sd, mean + 8.0 * sd, 2048);
}

// Pure-state quadrature density without forming the reduced density matrix:
// gather the amplitude matrix B with the measured mode as rows and every
// other index flattened into columns; the density at x is the squared row
// norm of Φ(x)ᵀ·B.  Cost is grid × dim × rest instead of grid × dim².
Distribution1D density_from_pure(const FockVector& psi, int mode,
                                 Quadrature quad, std::vector<double> grid) {
  const auto& cut = psi.cutoff;
  if (mode < 0 || mode >= cut.n_modes())
    throw std::out_of_range("mode index out of range");
  const int d = cut.dim(mode);
  const Eigen::Index total = psi.amps.size();
  const Eigen::Index st = cut.stride(mode);
  const Eigen::Index rest = total / d;
  Mat b(d, rest);
  Eigen::Index col = 0;
  for (Eigen::Index base = 0; base < total; ++base) {
    if ((base / st) % d != 0) continue;
    for (int k = 0; k < d; ++k) b(k, col) = psi.amps(base + k * st);
    ++col;
  }
  const double nrm = b.squaredNorm();
  if (!(nrm > 1e-300))
    throw std::runtime_error("state carries no probability mass");
  b /= std::sqrt(nrm);
  if (quad == Quadrature::P) {
    cxd f(1.0, 0.0);
    for (int n = 0; n < d; ++n, f *= cxd(0.0, -1.0)) b.row(n) *= f;
  }
  if (grid.empty()) {
    const Mat qb = q_op(d) * b;
    const double mean = b.conjugate().cwiseProduct(qb).sum().real();
    grid = default_grid(mean, qb.squaredNorm());
  }
  if (grid.size() < 2) throw std::invalid_argument("degenerate homodyne grid");
  const Eigen::MatrixXd phi = hermite_matrix(d, grid);
  const Mat g = phi.cast<cxd>() * b;
  std::vector<double> density(grid.size());
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    density[static_cast<std::size_t>(r)] = g.row(r).squaredNorm();
  return finish_density(std::move(grid), std::move(density));
}

Distribution1D density_from_reduced(Mat r, Quadrature quad,
                                    std::vector<double> grid) {
  const int d = static_cast<int>(r.rows());
  const double tr = r.trace().real();
  if (!(tr > 1e-300)) throw std::runtime_error("state carries no probability mass");
  r /= tr;
  if (quad == Quadrature::P) {
    const Mat ph = momentum_phases(d);
    r = ph * r * ph.adjoint();
  }
  if (grid.empty()) {
    const Mat q = q_op(d);
    grid = default_grid((q * r).trace().real(), (q * q * r).trace().real());
  }
  if (grid.size() < 2) throw std::invalid_argument("degenerate homodyne grid");
  Eigen::MatrixXd phi = hermite_matrix(d, grid);
  Eigen::MatrixXcd t = phi.cast<cxd>() * r;
  std::vector<double> density(grid.size());
  for (Eigen::Index g = 0; g < static_cast<Eigen::Index>(grid.size()); ++g) {
    const double v =
        t.row(g).cwiseProduct(phi.row(g).cast<cxd>()).sum().real();
    density[static_cast<std::size_t>(g)] = std::max(0.0, v);
  }
  return finish_density(std::move(grid), std::move(density));
}

}  // namespace

namespace {

// Reassemble u·e^L without underflowing prematurely: the carry u may be as
// large as ~1e250 while e^L alone is subnormal, yet the product is fine.
double descale(double u, double log_offset) {
  if (log_offset > -600.0) return u * std::exp(log_offset);
  if (log_offset > -1300.0) {
    const double h = std::exp(0.5 * log_offset);
    return (u * h) * h;
  }
  return 0.0;
}

}  // namespace

RVec hermite_functions(int dim, double x) {
  if (dim < 1) throw std::invalid_argument("need at least one level");
  RVec v(dim);
  // Three-term recursion with a running log offset.  Far outside the
  // classical turning point the ground level e^{-x²/2} underflows while the
  // high-index functions are O(1), so carry scaled values u_n = φ_n·e^{-L}
  // and rescale whenever the carries drift out of range.  Going up in index
  // the recursion follows the growing branch there, which is the wanted one.
  double log_offset = -0.5 * x * x;
  double prev = kInvQuarterRootPi;
  double cur = std::sqrt(2.0) * x * prev;
  v(0) = descale(prev, log_offset);
  if (dim > 1) v(1) = descale(cur, log_offset);
  for (int n = 2; n < dim; ++n) {
    const double next = x * std::sqrt(2.0 / n) * cur -
                        std::sqrt((n - 1.0) / n) * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > 1e250) {
      cur *= 1e-250;
      prev *= 1e-250;
      log_offset += std::log(1e250);
    } else if (mag > 0.0 && mag < 1e-250) {
      cur *= 1e250;
      prev *= 1e250;
      log_offset -= std::log(1e250);
    }
    v(n) = descale(cur, log_offset);
  }
  return v;
}

Eigen::MatrixXd hermite_matrix(int dim, const std::vector<double>& grid) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(grid.size()), dim);
  for (std::size_t g = 0; g < grid.size(); ++g)
    m.row(static_cast<Eigen::Index>(g)) = hermite_functions(dim, grid[g]).transpose();
  return m;
}

Distribution1D homodyne_pdf(const DensityMatrix& rho, int mode, Quadrature quad,
                            std::vector<double> grid) {
  return density_from_reduced(reduce_mode(rho, mode).mat, quad, std::move(grid));
}

Distribution1D homodyne_pdf(const FockVector& psi, int mode, Quadrature quad,
                            std::vector<double> grid) {
  return density_from_pure(psi, mode, quad, std::move(grid));
}

double homodyne_collapse(FockVector& psi, int mode, Quadrature quad, Rng& rng,
                         std::vector<double> grid) {
  const auto pdf = homodyne_pdf(psi, mode, quad, std::move(grid));
  return homodyne_collapse(psi, mode, quad, rng, pdf);
}

double homodyne_collapse(FockVector& psi, int mode, Quadrature quad, Rng& rng,
                         const Distribution1D& pdf) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t idx = pdf.density.size() - 1;
  for (std::size_t i = 0; i < pdf.density.size(); ++i) {
    acc += pdf.density[i] * pdf.step;
    if (acc >= u) {
      idx = i;
      break;
    }
  }
  const double xc = pdf.grid[idx];
  const int d = psi.cutoff.dim(mode);
  const RVec phi = hermite_functions(d, xc);
  Vec v(d);
  if (quad == Quadrature::Q) {
    v = phi.cast<cxd>();
  } else {
    cxd f(1.0, 0.0);  // |p⟩ = Σ i^n φ_n(p) |n⟩
    for (int n = 0; n < d; ++n, f *= cxd(0.0, 1.0)) v(n) = f * phi(n);
  }
  const double vn = v.norm();
  if (vn < 1e-150)
    throw std::runtime_error("sampled cell has a vanishing truncated kernel");
  // √step·|x_c⟩⟨x_c| as the Kraus factor: the state's renorm record then
  // absorbs exactly the sampled cell's probability.
  Mat kraus = (std::sqrt(pdf.step) / vn) * (v * v.adjoint());
  apply(psi, bind_op(psi.cutoff, {mode}, std::move(kraus), false));
  return xc;
}

Mat window_kernel(int dim, Quadrature quad, const PostSelectionWindow& w) {
  if (!(w.half_width > 0.0))
    throw std::invalid_argument("post-selection window needs positive half-width");
  // Composite Simpson across the window; the count scales with the number of
  // wavefunction oscillations ~ half_width·√(2·dim) inside it.
  auto panels = static_cast<std::size_t>(
      std::max(200.0, 40.0 * w.half_width * std::sqrt(2.0 * dim)));
  if (panels % 2 == 1) ++panels;
  const double lo = w.center - w.half_width;
  const double h = 2.0 * w.half_width / static_cast<double>(panels);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i <= panels; ++i) {
    const double wt =
        (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const RVec phi = hermite_functions(dim, lo + h * static_cast<double>(i));
    k.selfadjointView<Eigen::Lower>().rankUpdate(phi, wt * h / 3.0);
  }
  const Eigen::MatrixXd kfull = k.selfadjointView<Eigen::Lower>();
  Mat kc = kfull.cast<cxd>();
  if (quad == Quadrature::P) {
    const Mat ph = momentum_phases(dim).adjoint();  // diag(i^n)
    kc = ph * kc * ph.adjoint();
  }
  return kc;
}

namespace {
template <typename State>
double postselect_impl(State& st, int mode, Quadrature quad,
                       const PostSelectionWindow& w) {
  const int d = st.cutoff.dim(mode);
  auto op = bind_op(st.cutoff, {mode}, window_kernel(d, quad, w), false);
  const double success = expectation(st, op).real();
  if (success < 1e-300)
    throw std::runtime_error("post-selection window carries no probability mass");
  const double before = st.renorm;
  apply(st, op);  // Kraus collapse (its own bookkeeping uses ⟨K†K⟩)
  st.renorm = before * success;  // record the continuum window mass instead
  return success;
}
}  // namespace

double postselect(FockVector& psi, int mode, Quadrature quad,
                  const PostSelectionWindow& w) {
  return postselect_impl(psi, mode, quad, w);
}

double postselect(DensityMatrix& rho, int mode, Quadrature quad,
                  const PostSelectionWindow& w) {
  return postselect_impl(rho, mode, quad, w);
}

Distribution2D homodyne_joint_pdf(const FockVector& psi, int mode_a, int mode_b,
                                  Quadrature qa, Quadrature qb,
                                  const std::vector<double>& grid_a,
                                  const std::vector<double>& grid_b) {
  if (mode_a == mode_b)
    throw std::invalid_argument("joint density needs two distinct modes");
  if (grid_a.size() < 2 || grid_b.size() < 2)
    throw std::invalid_argument("degenerate joint grid");
  FockVector work = psi;
  const double nrm = work.amps.norm();
  if (nrm < 1e-150) throw std::runtime_error("state carries no probability mass");
  work.amps /= nrm;
  if (qa == Quadrature::P)
    apply(work, bind_op(work.cutoff, {mode_a},
                        momentum_phases(work.cutoff.dim(mode_a)), true));
  if (qb == Quadrature::P)
    apply(work, bind_op(work.cutoff, {mode_b},
                        momentum_phases(work.cutoff.dim(mode_b)), true));

  const auto& cut = work.cutoff;
  const int da = cut.dim(mode_a), db = cut.dim(mode_b);
  const std::size_t sa = cut.stride(mode_a), sb = cut.stride(mode_b);
  // Base indices with zero occupation in both measured modes enumerate the
  // spectator configurations.
  std::vector<std::size_t> bases;
  bases.reserve(cut.total() / (static_cast<std::size_t>(da) * db));
  for (std::size_t idx = 0; idx < cut.total(); ++idx)
    if ((idx / sa) % static_cast<std::size_t>(da) == 0 &&
        (idx / sb) % static_cast<std::size_t>(db) == 0)
      bases.push_back(idx);

  const Eigen::MatrixXd pa = hermite_matrix(da, grid_a);
  const Eigen::MatrixXd pb = hermite_matrix(db, grid_b);
  const Eigen::MatrixXcd pac = pa.cast<cxd>(), pbc = pb.cast<cxd>();

  Distribution2D out;
  out.grid_x = grid_a;
  out.grid_y = grid_b;
  out.step_x = grid_a[1] - grid_a[0];
  out.step_y = grid_b[1] - grid_b[0];
  Eigen::MatrixXd dens =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid_a.size()),
                            static_cast<Eigen::Index>(grid_b.size()));
  Eigen::MatrixXcd block(da, db);
  for (std::size_t base : bases) {
    for (int m = 0; m < da; ++m)
      for (int n = 0; n < db; ++n)
        block(m, n) = work.amps(static_cast<Eigen::Index>(
            base + static_cast<std::size_t>(m) * sa +
            static_cast<std::size_t>(n) * sb));
    const Eigen::MatrixXcd g = pac * block * pbc.transpose();
    dens += g.cwiseAbs2();
  }
  out.density.assign(dens.size(), 0.0);
  for (Eigen::Index ix = 0; ix < dens.rows(); ++ix)
    for (Eigen::Index iy = 0; iy < dens.cols(); ++iy)
      out.density[static_cast<std::size_t>(ix) * grid_b.size() +
                  static_cast<std::size_t>(iy)] = dens(ix, iy);
  const double mass = out.total_mass();
  if (std::abs(mass - 1.0) > 1e-3)
    throw std::runtime_error(
        "joint homodyne grid misses probability mass beyond 1e-3; widen it");
  out.normalize();
  return out;
}

}  // namespace cvqml
