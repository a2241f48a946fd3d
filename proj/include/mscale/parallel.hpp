#ifndef MSCALE_PARALLEL_HPP
#define MSCALE_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mscale {

/// Worker cap: min(hardware_concurrency, MSCALE_THREADS), at least 1.
inline int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("MSCALE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

/// Runs f(i) for i in [0, count). Work items must derive any randomness
/// from their own index so results do not depend on the schedule. The
/// work is striped statically; exceptions are rethrown on the caller.
template <class F>
void parallel_for(int count, F&& f) {
    const int workers = std::min(worker_count(), std::max(count, 1));
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mscale

#endif
