#include "slowmo/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace slowmo {

namespace {
std::atomic<unsigned> g_threads{0};
}

void fail(ErrorKind kind, const std::string& module, const std::string& what) {
    throw Error(kind, module, what);
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
    unsigned n = g_threads.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t block = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * block;
            const std::size_t hi = std::min(n, lo + block);
            if (lo >= hi) break;
            pool.emplace_back([lo, hi, w, &fn, &errors] {
                try {
                    for (std::size_t i = lo; i < hi; ++i) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double circular_distance(double a, double b) {
    const double d = wrap_angle(a - b);
    return std::min(d, kTwoPi - d);
}

double round_sig9(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

}  // namespace slowmo
