#pragma once
// Deterministic randomness: a seeded engine plus cheap independent
// substreams, so multi-threaded runs draw identical numbers regardless of
// scheduling (each work item gets its own stream keyed by index).

#include <cstdint>
#include <random>

#include "cvqml/fock.hpp"

namespace cvqml {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  std::uint64_t integer_below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
  }
  // Independent substream for work item k; deterministic in (seed, k) only.
  Rng stream(std::uint64_t k) const {
    return Rng(splitmix64(seed_ ^ splitmix64(k + 0x632be59bd9b4e019ULL)));
  }
  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

inline Vec random_unit_vector(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cxd(rng.normal(), rng.normal());
  return v / v.norm();
}

// Random rank-`rank` density matrix (Wishart construction, unit trace).
inline Mat random_density(int dim, int rank, Rng& rng) {
  Mat g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// Haar-ish random unitary: QR of a complex Gaussian with phase-fixed R.
inline Mat random_unitary(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    cxd d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : cxd(1.0, 0.0);
  }
  return q;
}

}  // namespace cvqml
