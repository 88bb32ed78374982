#include "olrnn/params.hpp"

namespace olrnn {

GroupLayout::GroupLayout(std::vector<GroupInfo> groups) : groups_(std::move(groups)) {
  Index off = 0;
  for (auto& g : groups_) {
    g.offset = off;
    off += g.size();
  }
  total_ = off;
}

const GroupInfo& GroupLayout::at(std::string_view name) const {
  for (const auto& g : groups_)
    if (g.name == name) return g;
  throw ShapeError("layout: no group named '" + std::string(name) + "'");
}

bool GroupLayout::has(std::string_view name) const {
  for (const auto& g : groups_)
    if (g.name == name) return true;
  return false;
}

Matrix& ParamSet::at(std::string_view name) {
  auto it = groups_.find(name);
  if (it == groups_.end())
    throw ShapeError("params: no group named '" + std::string(name) + "'");
  return it->second;
}

const Matrix& ParamSet::at(std::string_view name) const {
  auto it = groups_.find(name);
  if (it == groups_.end())
    throw ShapeError("params: no group named '" + std::string(name) + "'");
  return it->second;
}

void ParamSet::insert(std::string name, Matrix value) {
  groups_.insert_or_assign(std::move(name), std::move(value));
}

Index ParamSet::total_params() const {
  Index n = 0;
  for (const auto& [name, t] : groups_) n += t.size();
  return n;
}

bool ParamSet::all_finite() const {
  for (const auto& [name, t] : groups_)
    if (!t.allFinite()) return false;
  return true;
}

}  // namespace olrnn
