#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "qisomap/errors.hpp"

namespace qisomap::fixedpoint {

// l-bit two's-complement fixed-point word with f fraction bits.
// The all-ones code is reserved as a finite "infinity" sentinel so that
// non-edges stay maximal under unsigned comparison.
struct FpFormat {
    int total_bits = 16;     // l
    int fraction_bits = 4;   // f

    std::uint64_t sentinel_max() const { return (std::uint64_t(1) << total_bits) - 1; }
    double scale() const { return std::ldexp(1.0, fraction_bits); }
    // largest representable finite magnitude bound: |v| < 2^(l-1-f)
    double range() const { return std::ldexp(1.0, total_bits - 1 - fraction_bits); }

    bool valid() const {
        return fraction_bits >= 0 && fraction_bits < total_bits && total_bits <= 62;
    }
    bool operator==(const FpFormat& o) const {
        return total_bits == o.total_bits && fraction_bits == o.fraction_bits;
    }
};

struct FpCode {
    std::uint64_t raw = 0;
    FpFormat format;
};

inline constexpr double kInfinityMarker = std::numeric_limits<double>::infinity();

inline std::uint64_t mask(const FpFormat& fmt) {
    return (std::uint64_t(1) << fmt.total_bits) - 1;
}

// Round-half-to-even quantization of v into raw code space.
inline FpCode encode(double v, const FpFormat& fmt) {
    if (std::isinf(v) && v > 0) return {fmt.sentinel_max(), fmt};
    if (!(std::fabs(v) < fmt.range()))
        throw OverflowError("encode: value " + std::to_string(v) + " out of range for l=" +
                            std::to_string(fmt.total_bits) + " f=" + std::to_string(fmt.fraction_bits));
    double scaled = v * fmt.scale();
    double r = std::nearbyint(scaled);  // default rounding mode is round-half-even
    auto q = static_cast<std::int64_t>(r);
    std::uint64_t raw = static_cast<std::uint64_t>(q) & mask(fmt);
    if (raw == fmt.sentinel_max()) {
        // -2^(-f) would collide with the sentinel; nudge toward zero.
        raw = (raw + 1) & mask(fmt);
    }
    return {raw, fmt};
}

// Signed-interpret(raw) * 2^(-f); the sentinel decodes to +infinity.
inline double decode(const FpCode& c) {
    if (c.raw == c.format.sentinel_max()) return kInfinityMarker;
    std::uint64_t signbit = std::uint64_t(1) << (c.format.total_bits - 1);
    std::int64_t s = static_cast<std::int64_t>(c.raw);
    if (c.raw & signbit) s -= std::int64_t(1) << c.format.total_bits;
    return static_cast<double>(s) / c.format.scale();
}

inline double decode_raw(std::uint64_t raw, const FpFormat& fmt) { return decode({raw, fmt}); }

// Plain two's-complement interpretation, no sentinel: for registers holding
// signed Gram entries rather than distances.
inline double decode_signed(std::uint64_t raw, const FpFormat& fmt) {
    std::uint64_t signbit = std::uint64_t(1) << (fmt.total_bits - 1);
    std::int64_t s = static_cast<std::int64_t>(raw & mask(fmt));
    if (raw & signbit) s -= std::int64_t(1) << fmt.total_bits;
    return static_cast<double>(s) / fmt.scale();
}

inline std::uint64_t encode_signed(double v, const FpFormat& fmt) {
    if (!(std::fabs(v) < fmt.range()))
        throw OverflowError("encode_signed: value out of range");
    auto q = static_cast<std::int64_t>(std::nearbyint(v * fmt.scale()));
    return static_cast<std::uint64_t>(q) & mask(fmt);
}

// Format wide enough that a sum of two path lengths (<= 2*N*max_distance)
// stays finite and the four-term centered sum cannot overflow:
// l >= f + ceil(log2(4*N*max_distance)) + 2.
inline FpFormat choose_format(double max_distance, int n, int precision_bits) {
    if (max_distance <= 0) max_distance = 1.0;
    int guard = static_cast<int>(std::ceil(std::log2(4.0 * n * max_distance)));
    if (guard < 1) guard = 1;
    FpFormat fmt;
    fmt.fraction_bits = precision_bits >= 0 ? precision_bits : 0;
    fmt.total_bits = fmt.fraction_bits + guard + 2;
    if (fmt.total_bits > 62)
        throw OverflowError("choose_format: required width exceeds 62 bits");
    return fmt;
}

}  // namespace qisomap::fixedpoint
