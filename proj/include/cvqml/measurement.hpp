#pragma once
// Homodyne measurement on truncated modes: quadrature probability densities,
// seeded sampling with wavefunction collapse, and finite-window post-selection.
//
// Position-basis wavefunctions of the Fock levels are the orthonormal Hermite
// functions φ_n; in this library's convention the momentum representation of
// |n⟩ is (−i)^n·φ_n, so every P-quadrature quantity is the corresponding
// Q-quantity of the phase-rotated state diag((−i)^n)·ψ.

#include <vector>

#include "cvqml/dist.hpp"
#include "cvqml/fock.hpp"
#include "cvqml/rng.hpp"

namespace cvqml {

enum class Quadrature { Q, P };

struct PostSelectionWindow {
  double center = 0.0;
  double half_width = 0.1;
};

// Orthonormal Hermite functions φ_0(x) … φ_{dim−1}(x) by the stable
// three-term recurrence φ_n = x·√(2/n)·φ_{n−1} − √((n−1)/n)·φ_{n−2}.
RVec hermite_functions(int dim, double x);
// Φ[g, n] = φ_n(grid[g]).
Eigen::MatrixXd hermite_matrix(int dim, const std::vector<double>& grid);

// Marginal quadrature density of one mode. With an empty grid a default of
// 2048 points spanning mean ± 8·SD of the marginal is used. The computed grid
// mass must reach 1 within 1e−3 (else the state leaks off the grid → error);
// the returned density is then normalized exactly on the grid.
Distribution1D homodyne_pdf(const DensityMatrix& rho, int mode, Quadrature quad,
                            std::vector<double> grid = {});
Distribution1D homodyne_pdf(const FockVector& psi, int mode, Quadrature quad,
                            std::vector<double> grid = {});

// Draw one outcome by inverse-CDF over the grid cells and collapse the mode
// onto the sampled cell: the Kraus factor is the rank-1 compression
// √step·|x_c⟩⟨x_c| of the cell projector, so the recorded weight (renorm)
// picks up exactly the cell probability. Returns the cell center.
double homodyne_collapse(FockVector& psi, int mode, Quadrature quad, Rng& rng,
                         std::vector<double> grid = {});

// Same collapse, but drawing against a caller-supplied density — use when
// sampling the same prepared state many times so its density is computed
// once. `pdf` must be the quadrature density of `psi` on this mode; sampling
// from a stale density draws from the wrong law.
double homodyne_collapse(FockVector& psi, int mode, Quadrature quad, Rng& rng,
                         const Distribution1D& pdf);

// Truncated-basis kernel of the window projector: K[m,n] = ∫_w φ_m·φ_n for Q
// (phase-conjugated for P). Hermitian, eigenvalues in [0, 1] up to truncation.
Mat window_kernel(int dim, Quadrature quad, const PostSelectionWindow& w);

// Post-select the quadrature inside the window. Returns the continuum success
// probability tr(ρ·K) — which is also what the state's renorm record absorbs —
// and collapses the state with the kernel as a Kraus factor. Throws if the
// window mass is numerically zero.
double postselect(FockVector& psi, int mode, Quadrature quad,
                  const PostSelectionWindow& w);
double postselect(DensityMatrix& rho, int mode, Quadrature quad,
                  const PostSelectionWindow& w);

// Joint density of two distinct modes of a pure state on a product grid.
Distribution2D homodyne_joint_pdf(const FockVector& psi, int mode_a, int mode_b,
                                  Quadrature qa, Quadrature qb,
                                  const std::vector<double>& grid_a,
                                  const std::vector<double>& grid_b);

}  // namespace cvqml
