#include "scarsim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "scarsim/error.hpp"

namespace scarsim {

int resolve_threads(int requested) {
    if (const char* env = std::getenv("SCARSIM_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 0) fail(ErrorKind::Config, std::string("SCARSIM_THREADS is not a count: ") + env);
        requested = static_cast<int>(v);
    }
    if (requested < 0) fail(ErrorKind::Config, "thread count must be non-negative");
    if (requested == 0) requested = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return requested;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr first;
    std::mutex guard;
    auto run = [&] {
        while (!abort.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (!first) first = std::current_exception();
                abort = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace scarsim
