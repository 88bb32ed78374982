#include "olrnn/checkpoint.hpp"

#include <fstream>

#include "olrnn/tensor_io.hpp"

namespace olrnn {

namespace {

constexpr char kMagic[4] = {'O', 'L', 'R', 'N'};
constexpr std::uint16_t kVersion = 1;

std::uint8_t arch_tag(Arch a) { return std::uint8_t(a); }

Arch arch_from_tag(std::uint8_t t) {
  switch (t) {
    case 0: return Arch::VanillaRnn;
    case 1: return Arch::Gru;
    case 2: return Arch::Lstm;
    case 3: return Arch::Ctrnn;
  }
  throw FormatError("checkpoint: unknown architecture tag");
}

}  // namespace

void checkpoint_save(const std::string& path, const CellSpec& spec,
                     const ParamSet& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("checkpoint: cannot open '" + path + "' for writing");
  os.write(kMagic, 4);
  write_u16(os, kVersion);
  os.put(char(arch_tag(spec.arch)));
  write_u32(os, std::uint32_t(spec.n_in));
  write_u32(os, std::uint32_t(spec.n_hidden));
  write_u32(os, std::uint32_t(spec.n_out));
  write_f64(os, spec.ctrnn_tau);
  write_f64(os, spec.ctrnn_dt);
  write_u32(os, std::uint32_t(params.size()));
  for (const auto& [name, tensor] : params) {  // map iterates in name order
    write_u16(os, std::uint16_t(name.size()));
    os.write(name.data(), std::streamsize(name.size()));
    if (tensor.cols() == 1) {
      write_tensor(os, Vector(tensor.col(0)));
    } else {
      write_tensor(os, tensor);
    }
  }
  if (!os) throw FormatError("checkpoint: write failed for '" + path + "'");
}

Checkpoint checkpoint_load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("checkpoint: cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string_view(magic, 4) != std::string_view(kMagic, 4))
    throw FormatError("checkpoint: bad magic");
  std::uint16_t version = read_u16(is);
  if (version != kVersion) throw FormatError("checkpoint: unsupported version");

  Checkpoint cp;
  int tag = is.get();
  if (tag < 0) throw FormatError("checkpoint: truncated header");
  cp.spec.arch = arch_from_tag(std::uint8_t(tag));
  cp.spec.n_in = Index(read_u32(is));
  cp.spec.n_hidden = Index(read_u32(is));
  cp.spec.n_out = Index(read_u32(is));
  cp.spec.ctrnn_tau = read_f64(is);
  cp.spec.ctrnn_dt = read_f64(is);
  std::uint32_t n_groups = read_u32(is);

  for (std::uint32_t i = 0; i < n_groups; ++i) {
    std::uint16_t len = read_u16(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    if (!is) throw FormatError("checkpoint: truncated group name");
    TensorData t = read_tensor(is);
    if (t.dims.size() == 1) {
      cp.params.insert(std::move(name), Matrix(t.as_vector()));
    } else {
      cp.params.insert(std::move(name), t.as_matrix());
    }
  }

  // Validate against the architecture's shape table: a truncated or foreign
  // file must not produce a partially usable ParamSet.
  auto shapes = param_shapes(cp.spec);
  if (shapes.size() != cp.params.size())
    throw FormatError("checkpoint: group count does not match architecture");
  for (const auto& g : shapes) {
    if (!cp.params.has(g.name))
      throw FormatError("checkpoint: missing group '" + g.name + "'");
    const Matrix& m = cp.params.at(g.name);
    if (m.rows() != g.rows || m.cols() != g.cols)
      throw FormatError("checkpoint: shape mismatch in group '" + g.name + "'");
  }
  return cp;
}

}  // namespace olrnn
