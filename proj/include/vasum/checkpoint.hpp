#pragma once

#include <filesystem>

#include "vasum/model.hpp"

namespace vasum {

// Layout: 8-byte magic "VASUMCKP", uint32 little-endian header length, UTF-8
// JSON header {"format", "version", "config", "tensors": [{name, shape,
// dtype}]}, then each tensor as little-endian float32 in header order.
void save_checkpoint(const ModelParameters& params, const std::filesystem::path& path);
ModelParameters load_checkpoint(const std::filesystem::path& path);

}  // namespace vasum
