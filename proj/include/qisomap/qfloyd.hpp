#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "qisomap/errors.hpp"
#include "qisomap/fixedpoint.hpp"
#include "qisomap/linalg.hpp"
#include "qisomap/regsim.hpp"

namespace qisomap::qfloyd {

using fixedpoint::FpFormat;
using regsim::Label;
using regsim::OpLog;
using regsim::RegisterLayout;
using regsim::RegisterState;

// Symmetric adjacency in code space: zero diagonal, sentinel for non-edges.
struct AdjacencyInput {
    int n = 0;
    FpFormat format;
    std::vector<std::uint64_t> codes;  // n*n, row-major

    std::uint64_t at(int i, int j) const { return codes[std::size_t(i) * n + j]; }
    std::uint64_t& at(int i, int j) { return codes[std::size_t(i) * n + j]; }
};

inline AdjacencyInput quantize_adjacency(const Mat& d, const FpFormat& fmt) {
    AdjacencyInput adj;
    adj.n = d.rows();
    adj.format = fmt;
    adj.codes.resize(std::size_t(adj.n) * adj.n);
    for (int i = 0; i < adj.n; ++i)
        for (int j = 0; j < adj.n; ++j) {
            if (std::fabs(d(i, j) - d(j, i)) > 1e-12 && !(std::isinf(d(i, j)) && std::isinf(d(j, i))))
                throw AsymmetricInput("adjacency not symmetric");
            adj.at(i, j) = fixedpoint::encode(d(i, j), fmt).raw;
        }
    for (int i = 0; i < adj.n; ++i)
        if (adj.at(i, i) != 0) throw AsymmetricInput("adjacency diagonal not zero");
    return adj;
}

struct GeodesicState {
    RegisterState register_form;   // (1/N) sum |i>|j>|d_ij^(N)>
    RegisterState amplitude_form;  // sum sqrt(d_ij^(N)/G) |i>|j>|d_ij^(N)>
    double normalizer = 0;         // G
    double qdac_success = 0;       // P1 diagnostic
    bool disconnected = false;
    FpFormat format;
    int n = 0;
};

inline int index_bits(int n) {
    int b = 1;
    while ((1 << b) < n) ++b;
    return b;
}

inline RegisterLayout floyd_layout(int n, const FpFormat& fmt) {
    int ib = index_bits(n), l = fmt.total_bits;
    return RegisterLayout{{{"i", ib},
                           {"j", ib},
                           {"d", l},
                           {"out", l},
                           {"flag5", 1},
                           {"anc", 1},
                           {"f6", 1},
                           {"r7", l},
                           {"f8", 1},
                           {"r9", l},
                           {"r10", l}}};
}

inline const std::vector<std::string>& floyd_ancillas() {
    static const std::vector<std::string> a = {"out", "flag5", "anc", "f6", "r7", "f8", "r9", "r10"};
    return a;
}

// One relax-and-update round for pivot k. `prev` is the round r-1 distance
// lookup in code space (the per-round shadow of the stateful oracle).
// Postcondition: register "d" holds min(d_ij, d_ik + d_kj), all work
// registers back to zero.
inline RegisterState floyd_iteration(const RegisterState& state, int k,
                                     const std::function<std::uint64_t(int, int)>& prev) {
    const RegisterLayout& lay = state.layout;
    int ii = lay.index("i"), jj = lay.index("j");
    OpLog log;
    RegisterState s = state;

    // equality flags, then flipped so 0 marks "index differs from pivot"
    s = regsim::equality_flag(s, k, "i", "f6", &log);
    s = regsim::equality_flag(s, k, "j", "f8", &log);
    s = regsim::bit_flip(s, "f6", &log);
    s = regsim::bit_flip(s, "f8", &log);

    // pivot-row loads; the all-ones fill on the "endpoint equals pivot" branch
    // drives the candidate sum into the overflow branch, so those terms are
    // never updated (classically they would be no-ops anyway)
    s = regsim::controlled_load(
        s, "f6", "r7", [&prev, ii, k](const Label& l) { return prev(int(l[ii]), k); }, true, &log);
    s = regsim::controlled_load(
        s, "f8", "r9", [&prev, jj, k](const Label& l) { return prev(k, int(l[jj])); }, true, &log);

    // working copy of d_ij; replaced below, so deliberately kept out of the log
    int dd = lay.index("d");
    s = regsim::xor_load(s, "out", [dd](const Label& l) { return l[dd]; }, nullptr);

    // (anc, r7) += r9: anc = 1 marks the overflow/garbage branch
    s = regsim::add_into(s, "r9", {"anc", "r7"}, &log);

    // copy the candidate sum where it did not overflow, then arm the compare flag
    int r7 = lay.index("r7");
    s = regsim::controlled_load(s, "anc", "r10", [r7](const Label& l) { return l[r7]; }, false, &log);
    s = regsim::bit_flip(s, "flag5", &log);

    // (flag5, anc, r7) -= d_ij: flag5 drops to 0 exactly when d_ij > d_ik + d_kj
    s = regsim::subtract_compare(s, "d", {"flag5", "anc", "r7"}, &log);

    // update branch: out := r10 (the shorter path)
    s = regsim::conditional_replace(s, "flag5", "out", "r10", "d", nullptr);

    // restore every work register
    s = regsim::uncompute(s, log, {"flag5", "anc", "f6", "r7", "f8", "r9", "r10"});

    // clear the stale payload against the oracle and swap the result in
    s = regsim::xor_load(s, "d", [&prev, ii, jj](const Label& l) {
        return prev(int(l[ii]), int(l[jj]));
    });
    int oo = lay.index("out");
    s = regsim::map_labels(s, [dd, oo](Label& l) { std::swap(l[dd], l[oo]); });
    return s;
}

// Reads the distance register back into a shadow table; every (i,j) pair must
// appear exactly once.
inline std::vector<std::uint64_t> read_distance_table(const RegisterState& s, int n) {
    int ii = s.layout.index("i"), jj = s.layout.index("j"), dd = s.layout.index("d");
    std::vector<std::uint64_t> table(std::size_t(n) * n, ~std::uint64_t(0));
    int seen = 0;
    for (const auto& [label, amp] : s.terms) {
        std::size_t idx = label[ii] * n + label[jj];
        if (table[idx] != ~std::uint64_t(0)) throw std::runtime_error("duplicate (i,j) term");
        table[idx] = label[dd];
        ++seen;
    }
    if (seen != n * n) throw std::runtime_error("distance register state lost terms");
    return table;
}

// N pivot rounds of the reversible relax circuit, then QDAC into amplitudes.
inline GeodesicState run_quantum_floyd(const AdjacencyInput& adj) {
    const int n = adj.n;
    const FpFormat fmt = adj.format;
    RegisterLayout lay = floyd_layout(n, fmt);
    // wide formats push the five l-bit work registers past the default cap
    RegisterState state = regsim::init_uniform(lay, n, "i", "j", "d",
                                               [&adj](int i, int j) { return adj.at(i, j); }, 384);
    std::vector<std::uint64_t> shadow = adj.codes;
    for (int k = 0; k < n; ++k) {
        auto prev = [&shadow, n](int i, int j) { return shadow[std::size_t(i) * n + j]; };
        state = floyd_iteration(state, k, prev);
        shadow = read_distance_table(state, n);
    }

    GeodesicState out;
    out.n = n;
    out.format = fmt;
    out.register_form = state;
    for (std::uint64_t c : shadow)
        if (c == fmt.sentinel_max()) out.disconnected = true;

    double g = 0;
    for (std::uint64_t c : shadow) {
        double v = fixedpoint::decode_raw(c, fmt);
        if (std::isfinite(v)) g += v;
    }
    out.normalizer = g;
    if (!out.disconnected && g > 0) {
        auto [amp, p1] = regsim::qdac_amplitude(
            state, "d", regsim::QdacMode::Sqrt,
            [fmt](std::uint64_t raw) { return fixedpoint::decode_raw(raw, fmt); });
        out.amplitude_form = amp;
        out.qdac_success = p1;
    }
    return out;
}

// Classical triple-loop oracle on decoded values; non-edges ride along as inf.
inline Mat classical_floyd(const AdjacencyInput& adj) {
    const int n = adj.n;
    Mat d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = fixedpoint::decode_raw(adj.at(i, j), adj.format);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double via = d(i, k) + d(k, j);
                if (via < d(i, j)) d(i, j) = via;
            }
    return d;
}

}  // namespace qisomap::qfloyd
