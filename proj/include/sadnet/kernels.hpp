#pragma once

namespace sadnet::kernels {

// Arguments of the fused state-update kernel. All arrays have length n and
// may not alias the outputs. wa = W*a and wx = Wtilde*x are precomputed by
// the matvec kernel. u may be null (uncontrolled update).
struct StepArgs {
  int n = 0;
  const double* a = nullptr;
  const double* d = nullptr;
  const double* x = nullptr;
  const double* wa = nullptr;
  const double* wx = nullptr;
  const double* beta = nullptr;
  const double* gamma = nullptr;
  const double* theta = nullptr;
  const double* delta = nullptr;
  const double* alpha = nullptr;
  const double* lambda = nullptr;
  const double* xi = nullptr;
  const double* prejudice = nullptr;
  const double* u = nullptr;
  double* out_a = nullptr;
  double* out_d = nullptr;
  double* out_x = nullptr;
};

// One table per instruction set. Every entry must produce bit-identical
// results to the scalar reference: the vector variants keep the scalar
// per-element operation order and use no FMA, so a run is reproducible no
// matter which table was dispatched.
struct Ops {
  const char* name;
  // out = m * v with m row-major n*n, per-row left-to-right accumulation.
  void (*matvec)(const double* m, const double* v, double* out, int n);
  void (*step)(const StepArgs& args);
  double (*max_abs_diff)(const double* a, const double* b, int n);
};

const Ops& scalar_ops();

// True when the AVX2 variant is both compiled in and supported by the CPU.
bool avx2_available();
const Ops& avx2_ops();

// Table selected at first use: AVX2 when available, else scalar. The
// environment variable SADNET_SIMD (scalar|avx2|auto) forces a choice;
// forcing an unavailable variant falls back to scalar.
const Ops& active_ops();

}  // namespace sadnet::kernels
