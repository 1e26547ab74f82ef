#pragma once

#include <string>

#include "mmci/model.hpp"

namespace mmci {

// Checkpoint layout: a plain-text key-value header terminated by a line
// reading "tensors <count>", then each parameter tensor in all_tensors()
// order as a little-endian u64 element count followed by that many
// little-endian 64-bit floats.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

inline constexpr const char* kCheckpointMagic = "MMCI-CKPT";
inline constexpr int kCheckpointVersion = 1;

}  // namespace mmci
