#pragma once

#include <atomic>
#include <cstddef>
#include <functional>

namespace curate {

// Counts calls currently in flight and remembers the high-water mark.
class InFlightGauge {
public:
    class Guard {
    public:
        explicit Guard(InFlightGauge* g) : gauge_(g) {
            if (gauge_) gauge_->enter();
        }
        ~Guard() {
            if (gauge_) gauge_->leave();
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        InFlightGauge* gauge_;
    };

    std::size_t current() const { return current_.load(); }
    std::size_t peak() const { return peak_.load(); }
    void reset_peak() { peak_.store(current_.load()); }

private:
    void enter() {
        auto now = current_.fetch_add(1) + 1;
        auto prev = peak_.load();
        while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
        }
    }
    void leave() { current_.fetch_sub(1); }

    std::atomic<std::size_t> current_{0};
    std::atomic<std::size_t> peak_{0};
};

// Runs fn(i) for every i in [0, n) on at most `cap` threads. The first exception thrown
// by any task stops the remaining ones from starting and is rethrown to the caller.
void bounded_for_each(std::size_t n, std::size_t cap, const std::function<void(std::size_t)>& fn);

}  // namespace curate
