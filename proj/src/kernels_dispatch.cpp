#include "sadnet/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sadnet::kernels {

bool avx2_available() {
#ifdef SADNET_HAVE_AVX2
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

#ifndef SADNET_HAVE_AVX2
const Ops& avx2_ops() { return scalar_ops(); }
#endif

namespace {

const Ops& pick() {
  const char* env = std::getenv("SADNET_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_ops();
  if (env && std::strcmp(env, "avx2") == 0)
    return avx2_available() ? avx2_ops() : scalar_ops();
  return avx2_available() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& active_ops() {
  static const Ops& ops = pick();
  return ops;
}

}  // namespace sadnet::kernels
