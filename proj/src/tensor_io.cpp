#include "olrnn/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

namespace olrnn {

namespace {

void put_bytes(std::ostream& os, std::uint64_t v, int n) {
  char buf[8];
  for (int i = 0; i < n; ++i) buf[i] = char((v >> (8 * i)) & 0xFF);
  os.write(buf, n);
}

std::uint64_t get_bytes(std::istream& is, int n) {
  char buf[8];
  is.read(buf, n);
  if (!is) throw FormatError("tensor read: unexpected end of stream");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i)
    v |= std::uint64_t(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

}  // namespace

void write_u16(std::ostream& os, std::uint16_t v) { put_bytes(os, v, 2); }
void write_u32(std::ostream& os, std::uint32_t v) { put_bytes(os, v, 4); }
void write_f64(std::ostream& os, double v) {
  put_bytes(os, std::bit_cast<std::uint64_t>(v), 8);
}

std::uint16_t read_u16(std::istream& is) {
  return std::uint16_t(get_bytes(is, 2));
}
std::uint32_t read_u32(std::istream& is) {
  return std::uint32_t(get_bytes(is, 4));
}
double read_f64(std::istream& is) {
  return std::bit_cast<double>(get_bytes(is, 8));
}

void write_tensor(std::ostream& os, const Matrix& m) {
  write_u32(os, 2);
  write_u32(os, std::uint32_t(m.rows()));
  write_u32(os, std::uint32_t(m.cols()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) write_f64(os, m(r, c));
}

void write_tensor(std::ostream& os, const Vector& v) {
  write_u32(os, 1);
  write_u32(os, std::uint32_t(v.size()));
  for (Index i = 0; i < v.size(); ++i) write_f64(os, v[i]);
}

Matrix TensorData::as_matrix() const {
  if (dims.size() != 2) throw FormatError("tensor: expected rank 2");
  Matrix m(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      m(r, c) = data[std::size_t(r) * dims[1] + std::size_t(c)];
  return m;
}

Vector TensorData::as_vector() const {
  if (dims.size() != 1) throw FormatError("tensor: expected rank 1");
  Vector v(static_cast<Index>(dims[0]));
  for (Index i = 0; i < v.size(); ++i) v[i] = data[std::size_t(i)];
  return v;
}

TensorData read_tensor(std::istream& is) {
  TensorData t;
  std::uint32_t rank = read_u32(is);
  if (rank == 0 || rank > 8) throw FormatError("tensor read: bad rank");
  std::size_t count = 1;
  t.dims.resize(rank);
  for (auto& d : t.dims) {
    d = read_u32(is);
    if (d == 0) throw FormatError("tensor read: zero extent");
    count *= d;
  }
  t.data.resize(count);
  for (auto& x : t.data) {
    x = read_f64(is);
    if (!std::isfinite(x)) throw FormatError("tensor read: non-finite entry");
  }
  return t;
}

}  // namespace olrnn
