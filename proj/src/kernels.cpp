#include "scarsim/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace scarsim::kernels {

namespace {

std::atomic<bool> g_forced_scalar{false};

const KernelTable& detected() {
    static const KernelTable* table = [] {
        const char* env = std::getenv("SCARSIM_SIMD");
        if (env && std::string(env) == "scalar") return &scalar_table();
        const KernelTable* simd = avx2_table();
        return simd ? simd : &scalar_table();
    }();
    return *table;
}

}  // namespace

const KernelTable& active() { return g_forced_scalar.load(std::memory_order_relaxed) ? scalar_table() : detected(); }

void force_scalar(bool on) { g_forced_scalar.store(on, std::memory_order_relaxed); }

}  // namespace scarsim::kernels
