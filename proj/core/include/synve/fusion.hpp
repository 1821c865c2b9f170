#pragma once

#include <span>
#include <vector>

namespace synve {

// [v1 | v2 | v1+v2 | v1-v2 | v1*v2] with the product taken elementwise.
// Output length is 5 * v1.size(). Throws InputError on dimension mismatch.
std::vector<float> fuse(std::span<const float> v1, std::span<const float> v2);

// Writes the fused vector into `out` (size 5 * v1.size()).
void fuse_into(std::span<const float> v1, std::span<const float> v2, std::span<float> out);

}  // namespace synve
