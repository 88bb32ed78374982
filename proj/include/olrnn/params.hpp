#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "olrnn/types.hpp"

namespace olrnn {

// Flat layout of a fixed set of named tensor groups. Offsets index into a
// concatenated parameter vector; flattening within a group is row-major.
struct GroupInfo {
  std::string name;
  Index rows = 0;
  Index cols = 0;
  Index offset = 0;
  Index size() const { return rows * cols; }
};

class GroupLayout {
 public:
  GroupLayout() = default;
  // Groups are laid out in the order given (callers pass name-sorted lists).
  explicit GroupLayout(std::vector<GroupInfo> groups);

  const GroupInfo& at(std::string_view name) const;
  bool has(std::string_view name) const;
  Index total() const { return total_; }
  const std::vector<GroupInfo>& groups() const { return groups_; }

 private:
  std::vector<GroupInfo> groups_;
  Index total_ = 0;
};

// Named parameter groups; iteration order is name order. Biases are n x 1.
class ParamSet {
 public:
  using Map = std::map<std::string, Matrix, std::less<>>;

  Matrix& at(std::string_view name);
  const Matrix& at(std::string_view name) const;
  bool has(std::string_view name) const { return groups_.count(std::string(name)) > 0; }
  void insert(std::string name, Matrix value);

  Index total_params() const;
  bool all_finite() const;

  Map::iterator begin() { return groups_.begin(); }
  Map::iterator end() { return groups_.end(); }
  Map::const_iterator begin() const { return groups_.begin(); }
  Map::const_iterator end() const { return groups_.end(); }
  std::size_t size() const { return groups_.size(); }

 private:
  Map groups_;
};

}  // namespace olrnn
