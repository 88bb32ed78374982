#pragma once

#include "olrnn/rng.hpp"
#include "olrnn/types.hpp"

namespace olrnn {

Vector matvec(const Matrix& m, const Vector& v);

// Entries i.i.d. Normal(0, scale^2), filled in row-major order from rng.
Matrix gauss_init(Rng& rng, Index rows, Index cols, double scale);
Vector gauss_init_vector(Rng& rng, Index size, double scale);

template <class Derived>
double norm2(const Eigen::MatrixBase<Derived>& t) {
  return t.norm();
}

double cosine(const Vector& a, const Vector& b);
double cosine_flat(const Matrix& a, const Matrix& b);

// Largest singular value: power iteration on m^T m, square root of the
// dominant eigenvalue estimate. iters >= 200 converges to ~1e-3 on the
// matrices used here.
double spectral_radius(const Matrix& m, int iters, Rng& rng);

// Dominant |eigenvalue| of a (generally nonsymmetric) square matrix:
// power iteration on m itself with the growth rate averaged geometrically
// over the second half of the iterations, which handles complex-conjugate
// dominant pairs.
double dominant_eigen_magnitude(const Matrix& m, int iters, Rng& rng);

}  // namespace olrnn
