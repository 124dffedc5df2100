#include "disped/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace disped::kernels {

namespace {

const Table kScalarTable = {
    "scalar",
    scalar::matvec,
    scalar::axpy,
    scalar::add_scaled,
    scalar::rk4_combine,
    scalar::dot,
    scalar::sum,
    scalar::quad_penalty_grad,
};

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* g_active = nullptr;

Isa initial_choice() {
  if (const char* env = std::getenv("DISPED_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Isa::Avx2;
    throw std::runtime_error("DISPED_KERNELS must be 'scalar' or 'avx2'");
  }
  return best_supported();
}

}  // namespace

Isa best_supported() {
  if (avx2::table() != nullptr && cpu_has_avx2_fma()) return Isa::Avx2;
  return Isa::Scalar;
}

const Table& table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return kScalarTable;
    case Isa::Avx2: {
      const Table* t = avx2::table();
      if (t == nullptr || !cpu_has_avx2_fma())
        throw std::runtime_error("avx2 kernels unavailable on this cpu/build");
      return *t;
    }
  }
  throw std::logic_error("unknown kernel isa");
}

const Table& active() {
  if (g_active == nullptr) g_active = &table_for(initial_choice());
  return *g_active;
}

void select(Isa isa) { g_active = &table_for(isa); }

const char* isa_name(Isa isa) { return isa == Isa::Scalar ? "scalar" : "avx2"; }

}  // namespace disped::kernels
