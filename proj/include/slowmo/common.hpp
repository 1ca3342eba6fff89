#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slowmo {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
    Argument,
    Io,
    DimensionMismatch,
    Aperiodic,
    NoCycle,
    PhaseUndefined,
    CoverageEmpty,
};

/// Every failure raised by the library. The kind drives CLI exit codes; the
/// message is prefixed with the module that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& module, const std::string& what)
        : std::runtime_error(module + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& module, const std::string& what);

/// Requested thread count; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(i) for i in [0, n) over the configured thread pool size. Work is
/// split into contiguous blocks, so results written by index are
/// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double a);

/// Circular distance between two angles, in [0, pi].
double circular_distance(double a, double b);

/// Rounds to 9 significant digits; used for all JSON output.
double round_sig9(double x);

}  // namespace slowmo
