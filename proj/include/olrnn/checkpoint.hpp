#pragma once

#include <string>

#include "olrnn/cells.hpp"

namespace olrnn {

// Binary checkpoint: magic "OLRN", u16 format version, architecture tag,
// dimensions, then each parameter group in name order (u16 name length,
// name bytes, tensor in wire format). Round-trips bit-exactly.

void checkpoint_save(const std::string& path, const CellSpec& spec,
                     const ParamSet& params);

struct Checkpoint {
  CellSpec spec;
  ParamSet params;
};

Checkpoint checkpoint_load(const std::string& path);

}  // namespace olrnn
