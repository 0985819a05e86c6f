#include "kummer/parallel.hpp"

#include <atomic>
#include <future>
#include <thread>
#include <vector>

namespace kummer::par {

namespace {
std::atomic<int> g_workers{0};  // 0 = use hardware_concurrency
}

int worker_count() {
    int n = g_workers.load(std::memory_order_relaxed);
    if (n <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        n = hc == 0 ? 1 : static_cast<int>(hc);
    }
    return n;
}

void set_worker_count(int n) { g_workers.store(n, std::memory_order_relaxed); }

void parallel_for(std::size_t n_items, const std::function<void(std::size_t)>& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n_items <= 1) {
        for (std::size_t i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_items) break;
            fn(i);
        }
    };
    const int spawn = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers) - 1, n_items - 1));
    std::vector<std::future<void>> tasks;
    tasks.reserve(spawn);
    for (int t = 0; t < spawn; ++t) tasks.push_back(std::async(std::launch::async, drain));
    drain();
    for (auto& f : tasks) f.get();  // rethrows any worker exception
}

}  // namespace kummer::par
