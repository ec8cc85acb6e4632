#pragma once

#include <filesystem>
#include <vector>

#include "mds/nn/layers.hpp"

namespace mds::nn {

// Parameter blob layout ("MDSP" version 1):
//   magic "MDSP", uint32 header length, JSON header listing
//   {name, rows, cols} per tensor in order, then row-major float32
//   little-endian data per tensor.

void save_tensors(const std::filesystem::path& path, const std::vector<ParamRef>& params,
                  const std::vector<StateRef>& state);

/// Loads into existing tensors; names and shapes must match exactly.
void load_tensors(const std::filesystem::path& path, const std::vector<ParamRef>& params,
                  const std::vector<StateRef>& state);

}  // namespace mds::nn
