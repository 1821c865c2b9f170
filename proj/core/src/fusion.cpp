#include "synve/fusion.hpp"

#include <fmt/format.h>

#include "synve/error.hpp"

namespace synve {

void fuse_into(std::span<const float> v1, std::span<const float> v2, std::span<float> out) {
  const std::size_t d = v1.size();
  if (v2.size() != d) throw InputError(fmt::format("fuse: dimension mismatch {} vs {}", d, v2.size()));
  if (out.size() != 5 * d) throw InputError(fmt::format("fuse: output has {} slots, need {}", out.size(), 5 * d));
  float* a = out.data();
  float* b = a + d;
  float* sum = b + d;
  float* diff = sum + d;
  float* prod = diff + d;
  for (std::size_t i = 0; i < d; ++i) {
    a[i] = v1[i];
    b[i] = v2[i];
    sum[i] = v1[i] + v2[i];
    diff[i] = v1[i] - v2[i];
    prod[i] = v1[i] * v2[i];
  }
}

std::vector<float> fuse(std::span<const float> v1, std::span<const float> v2) {
  std::vector<float> out(5 * v1.size());
  fuse_into(v1, v2, out);
  return out;
}

}  // namespace synve
