// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace tactix {

template <typename T>
std::vector<T> run_parallel(std::size_t n, int parallelism, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        while (true) {
            auto i = next.fetch_add(1);
            if (i >= n) return;
            try {
                slots[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                next = n;
                return;
            }
        }
    };
    auto threads = static_cast<std::size_t>(std::max(1, parallelism));
    threads = std::min(threads, std::max<std::size_t>(1, n));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace tactix
