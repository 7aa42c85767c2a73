#ifndef SLOPEGYRE_PARALLEL_HPP
#define SLOPEGYRE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace slopegyre {

// Process-wide worker count for mode loops. Results never depend on it:
// workers write disjoint slots and reductions run sequentially afterwards.
void set_num_threads(int n);
int num_threads();

template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int nt = std::min(num_threads(), n > 0 ? n : 1);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::atomic<int> next{0};
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace slopegyre

#endif
