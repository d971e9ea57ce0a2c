#pragma once

#include <filesystem>

#include "deformsim/tensor.hpp"

namespace deformsim {

// Binary tensor file, little-endian throughout:
//   "DTNS" | u32 version (1) | u32 n,c,h,w | n*c*h*w float32, row-major.
// In-memory values are doubles; writing narrows to float32.
void tensor_write(const Tensor& t, const std::filesystem::path& path);
Tensor tensor_read(const std::filesystem::path& path);

} // namespace deformsim
