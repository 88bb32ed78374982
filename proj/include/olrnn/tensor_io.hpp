#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "olrnn/types.hpp"

namespace olrnn {

// Wire format, little-endian: u32 rank, u32 extent per dimension, then the
// entries as raw IEEE f64 in row-major order. Round-trips bit-exactly.

void write_u16(std::ostream& os, std::uint16_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_f64(std::ostream& os, double v);
std::uint16_t read_u16(std::istream& is);
std::uint32_t read_u32(std::istream& is);
double read_f64(std::istream& is);

void write_tensor(std::ostream& os, const Matrix& m);   // rank 2
void write_tensor(std::ostream& os, const Vector& v);   // rank 1

struct TensorData {
  std::vector<std::uint32_t> dims;
  std::vector<double> data;  // row-major
  Matrix as_matrix() const;  // rank 2 only
  Vector as_vector() const;  // rank 1 only
};

TensorData read_tensor(std::istream& is);

}  // namespace olrnn
