#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wdsemu/scenario.hpp"

namespace wdsemu {

using NetworkHash = std::array<std::uint8_t, 32>;

/// SHA-256 over a canonical little-endian encoding of ids, kinds, heads,
/// elevations, base demands and pipe attributes.
NetworkHash network_hash(const WaterNetwork& net);
std::string to_hex(const NetworkHash& hash);

inline constexpr std::uint32_t kContainerVersion = 1;

/// Dataset container: "WDSD", u32 version, 32-byte network hash, then
/// u64-dimensioned little-endian f64 matrices.
void save_dataset(const std::string& path, const ScenarioSet& set);
/// Throws DataError on bad magic, version or hash mismatch, or truncation.
ScenarioSet load_dataset(const std::string& path, const WaterNetwork& net);

struct Checkpoint {
  std::map<std::string, double> hyperparameters;
  std::vector<std::pair<std::string, Matrix>> tensors;

  const Matrix& tensor(const std::string& name) const;
};

/// Checkpoint container: "WDSM", u32 version, hyperparameter block, named
/// f64 tensors.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace wdsemu
