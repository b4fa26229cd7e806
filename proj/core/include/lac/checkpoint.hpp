#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lac/tensor.hpp"

namespace lac {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

/// Writes named tensors to a binary checkpoint file.
void save_checkpoint(const std::string& path, const NamedTensors& tensors);

/// Reads all tensors from a checkpoint file. Throws ParseError on any
/// structural problem (bad magic, truncation, duplicate names).
NamedTensors load_checkpoint(const std::string& path);

/// Copies values from `source` into matching entries of `target` by name.
/// Every target name must be present in `source` with identical shape.
void restore_into(const NamedTensors& source, NamedTensors& target);

}  // namespace lac
