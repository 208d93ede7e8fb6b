#include "graspforge/engine/checkpoint.hpp"

#include "graspforge/core/binary_io.hpp"
#include "graspforge/core/error.hpp"

namespace graspforge::engine {

namespace {
constexpr std::string_view kMagic = "GFCK";
}

std::vector<std::uint8_t> serialize_checkpoint(const ParameterSet& params) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  for (const auto& [id, t] : params.tensors()) {
    w.u32(static_cast<std::uint32_t>(id.size()));
    w.bytes(id);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u64(d);
    for (double v : t.data()) w.f64(v);
  }
  return std::move(w.buffer());
}

ParameterSet deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 8 || r.bytes(4) != kMagic) throw ParseError("not a checkpoint file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
  ParameterSet params;
  while (!r.at_end()) {
    const std::uint32_t name_len = r.u32();
    std::string id = r.bytes(name_len);
    const std::uint32_t rank = r.u32();
    if (rank == 0 || rank > 8) throw ParseError("checkpoint parameter '" + id + "' has invalid rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.u64();
    const std::size_t n = shape_size(shape);
    if (n > r.remaining() / 8) throw ParseError("checkpoint parameter '" + id + "' is truncated");
    std::vector<double> data(n);
    for (auto& v : data) v = r.f64();
    params.insert(id, Tensor(std::move(shape), std::move(data)));
  }
  return params;
}

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path) {
  write_file_bytes(path.string(), serialize_checkpoint(params));
}

ParameterSet load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file_bytes(path.string()));
}

}  // namespace graspforge::engine
