#include "curate/concurrency.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curate {

void bounded_for_each(std::size_t n, std::size_t cap, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    cap = std::clamp<std::size_t>(cap, 1, n);
    if (cap == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto worker = [&] {
        while (!failed.load()) {
            auto i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::jthread> threads;
    threads.reserve(cap);
    for (std::size_t t = 0; t < cap; ++t) threads.emplace_back(worker);
    threads.clear();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace curate
