#pragma once

#include <memory>

#include "olrnn/params.hpp"

namespace olrnn {

// Per-parameter state derivatives d state[j] / d theta[i] for the state-map
// parameter groups. Logically one (state_dim x group_size) tensor per group;
// stored as a single dense matrix with the flat parameter index on rows and
// the state component on columns, so the recursion P <- J P + D runs as one
// gemm (P * J^T) and group views are contiguous row blocks.
class Sensitivity {
 public:
  Sensitivity() = default;
  Sensitivity(std::shared_ptr<const GroupLayout> layout, Index state_dim)
      : layout_(std::move(layout)),
        data_(Matrix::Zero(layout_->total(), state_dim)) {}

  Matrix& data() { return data_; }
  const Matrix& data() const { return data_; }

  Index state_dim() const { return data_.cols(); }
  Index param_count() const { return data_.rows(); }
  const GroupLayout& layout() const { return *layout_; }
  std::shared_ptr<const GroupLayout> layout_ptr() const { return layout_; }

  auto group(std::string_view name) {
    const auto& g = layout_->at(name);
    return data_.middleRows(g.offset, g.size());
  }
  auto group(std::string_view name) const {
    const auto& g = layout_->at(name);
    return data_.middleRows(g.offset, g.size());
  }

  // Entry (state component i, group element [r, c]), matching the logical
  // (state_dim x group_size) orientation.
  double entry(std::string_view name, Index state_i, Index r, Index c) const {
    const auto& g = layout_->at(name);
    return data_(g.offset + r * g.cols + c, state_i);
  }

  void set_zero() { data_.setZero(); }
  bool all_finite() const { return data_.allFinite(); }
  std::size_t bytes() const { return std::size_t(data_.size()) * sizeof(double); }

  bool same_shape(const Sensitivity& o) const {
    return data_.rows() == o.data_.rows() && data_.cols() == o.data_.cols();
  }

 private:
  std::shared_ptr<const GroupLayout> layout_;
  Matrix data_;
};

}  // namespace olrnn
