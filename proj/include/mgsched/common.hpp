#pragma once

// Shared plumbing: error categories, seeded random sub-streams and a few
// numeric helpers used across the toolkit.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mgsched {

// Error categories map to CLI exit codes (1/2/3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named sub-stream derived from one master seed. Components draw from their
/// own stream, so regenerating scenario k gives identical samples no matter
/// what was drawn before it.
inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
    std::uint64_t h = mix64(seed ^ fnv1a(name));
    h = mix64(h ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return Rng(h);
}

/// Shortest round-trip decimal form; parse + re-emit is byte-identical.
inline std::string fmt_num(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

/// Composite Simpson rule on [a,b]; n is rounded up to an even count.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline bool nearly_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace mgsched
