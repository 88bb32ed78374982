#include "olrnn/linalg.hpp"

#include <cmath>

namespace olrnn {

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size())
    throw ShapeError("matvec: " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " against vector of length " +
                     std::to_string(v.size()));
  return m * v;
}

Matrix gauss_init(Rng& rng, Index rows, Index cols, double scale) {
  if (!(scale > 0.0)) throw ParamError("gauss_init: scale must be > 0");
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) out(r, c) = scale * rng.normal();
  return out;
}

Vector gauss_init_vector(Rng& rng, Index size, double scale) {
  if (!(scale > 0.0)) throw ParamError("gauss_init: scale must be > 0");
  Vector out(size);
  for (Index i = 0; i < size; ++i) out[i] = scale * rng.normal();
  return out;
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeError("cosine: length mismatch");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw UndefinedCosineError("cosine: zero-norm input");
  return a.dot(b) / (na * nb);
}

double cosine_flat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("cosine_flat: shape mismatch");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw UndefinedCosineError("cosine: zero-norm input");
  return (a.array() * b.array()).sum() / (na * nb);
}

double spectral_radius(const Matrix& m, int iters, Rng& rng) {
  if (m.rows() != m.cols()) throw ShapeError("spectral_radius: square matrix required");
  const Index n = m.rows();
  if (n == 0) return 0.0;
  Vector v = gauss_init_vector(rng, n, 1.0);
  double nv = v.norm();
  if (nv == 0.0) v.setOnes(), nv = v.norm();
  v /= nv;
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = m.transpose() * (m * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lambda = v.dot(w);  // Rayleigh quotient for m^T m
    v = w / nw;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double dominant_eigen_magnitude(const Matrix& m, int iters, Rng& rng) {
  if (m.rows() != m.cols())
    throw ShapeError("dominant_eigen_magnitude: square matrix required");
  const Index n = m.rows();
  if (n == 0) return 0.0;
  Vector v = gauss_init_vector(rng, n, 1.0);
  double nv = v.norm();
  if (nv == 0.0) v.setOnes(), nv = v.norm();
  v /= nv;
  double log_sum = 0.0;
  int counted = 0;
  const int burn = iters / 2;
  for (int k = 0; k < iters; ++k) {
    Vector w = m * v;
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    if (k >= burn) {
      log_sum += std::log(nw);
      ++counted;
    }
    v = w / nw;
  }
  return counted > 0 ? std::exp(log_sum / counted) : 0.0;
}

}  // namespace olrnn
