#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "graspforge/engine/optim.hpp"

namespace graspforge::engine {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout (little-endian):
//   "GFCK" | u32 version | per parameter, in id order:
//   u32 name length | name bytes (UTF-8) | u32 rank | u64 dims[rank] | f64 values
std::vector<std::uint8_t> serialize_checkpoint(const ParameterSet& params);
ParameterSet deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path);
ParameterSet load_checkpoint(const std::filesystem::path& path);

}  // namespace graspforge::engine
