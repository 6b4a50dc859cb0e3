#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace grix::cli {

template <class F>
void fan_out(std::size_t count, unsigned threads, F&& f) {
    threads = unsigned(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < count;) f(k);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

}  // namespace grix::cli
