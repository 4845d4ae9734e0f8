#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace adaptest {

// Invalid configuration or data (bad field, violated model bound).
// The CLI maps this to exit code 3.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation that cannot produce a meaningful result
// (quantile index out of range, degenerate split, ...).
// The CLI maps this to exit code 4.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a, used for design fingerprints in the critical-value cache.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string to_hex(std::uint64_t v);

// Canonical shortest round-trip formatting for doubles; used everywhere a
// double is written to CSV/JSON keys so that re-reading is exact.
std::string format_double(double v);

} // namespace adaptest
