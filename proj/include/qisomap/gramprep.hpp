#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qisomap/errors.hpp"
#include "qisomap/fixedpoint.hpp"
#include "qisomap/linalg.hpp"
#include "qisomap/qfloyd.hpp"
#include "qisomap/regsim.hpp"

namespace qisomap::gramprep {

using fixedpoint::FpFormat;
using qfloyd::GeodesicState;
using regsim::Label;
using regsim::OpLog;
using regsim::RegisterLayout;
using regsim::RegisterState;

// Encodes a value so its raw code has a zero LSB: values are quantized to one
// fraction bit fewer than the format carries, which keeps the four-term sum
// even and the Shift-R halving exact.
inline std::uint64_t encode_even(double v, const FpFormat& fmt) {
    FpFormat coarse{fmt.total_bits - 1, fmt.fraction_bits - 1};
    return (fixedpoint::encode_signed(v, coarse) << 1) & fixedpoint::mask(fmt);
}

struct MeanEstimates {
    std::vector<double> row;   // d_i* of the stored (squared) distances
    std::vector<double> col;   // d_*j
    double grand = 0;          // d_**, derived from the rows without sampling
    long samples = 0;          // m per entry (0 in exact mode)
    double epsilon = 0;
    double delta = 0;
    bool exact = false;
};

inline long hoeffding_samples(double value_range, double epsilon, double delta) {
    return static_cast<long>(
        std::ceil(value_range * value_range * std::log(2.0 / delta) / (2.0 * epsilon * epsilon)));
}

// True means of the quantized register values (the sampling bypass).
inline MeanEstimates exact_means(const std::function<double(int, int)>& value, int n) {
    MeanEstimates m;
    m.exact = true;
    m.row.assign(n, 0.0);
    m.col.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = value(i, j);
            m.row[i] += v / n;
            m.col[j] += v / n;
        }
    for (double r : m.row) m.grand += r / n;
    return m;
}

// Projective measurements of the amplitude-form state: outcome (i,j) occurs
// with probability v_ij / G, so (G/N) * frequency(i) is an unbiased estimate
// of the row mean. The grand mean comes from the row estimates, not from
// extra sampling.
inline MeanEstimates estimate_means(const GeodesicState& d2, double epsilon, double delta,
                                    long sample_cap, std::mt19937_64& rng) {
    const int n = d2.n;
    const FpFormat fmt = d2.format;
    int ii = d2.amplitude_form.layout.index("i");
    int jj = d2.amplitude_form.layout.index("j");
    int dd = d2.amplitude_form.layout.index("d");

    std::vector<double> probs;
    std::vector<std::pair<int, int>> outcomes;
    double vmax = 0;
    for (const auto& [label, amp] : d2.amplitude_form.terms) {
        probs.push_back(std::norm(amp));
        outcomes.emplace_back(int(label[ii]), int(label[jj]));
        vmax = std::max(vmax, fixedpoint::decode_raw(label[dd], fmt));
    }
    if (probs.empty()) throw AllZeroValues("estimate_means: empty amplitude state");

    long m = hoeffding_samples(vmax, epsilon, delta);
    if (m > sample_cap)
        throw SampleBudgetExceeded("estimate_means: need " + std::to_string(m) +
                                   " samples, cap " + std::to_string(sample_cap));

    std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
    std::vector<long> ci(n, 0), cj(n, 0);
    for (long s = 0; s < m; ++s) {
        auto [i, j] = outcomes[dist(rng)];
        ++ci[i];
        ++cj[j];
    }
    MeanEstimates est;
    est.samples = m;
    est.epsilon = epsilon;
    est.delta = delta;
    est.row.resize(n);
    est.col.resize(n);
    double g_over_n = d2.normalizer / n;
    for (int i = 0; i < n; ++i) {
        est.row[i] = g_over_n * double(ci[i]) / double(m);
        est.col[i] = g_over_n * double(cj[i]) / double(m);
    }
    for (double r : est.row) est.grand += r / n;
    return est;
}

struct GramState {
    RegisterState register_form;   // |i>|j>|k(i,j)> with work registers at zero
    RegisterState amplitude_form;  // sum k(i,j)/sqrt(C) |i>|j>|...>
    double normalizer = 0;         // C
    double qdac_success = 0;       // P2 diagnostic
    FpFormat format;
    int n = 0;

    // decoded k(i,j) matrix read off the register form
    Mat decode() const {
        Mat k(n, n);
        int ii = register_form.layout.index("i"), jj = register_form.layout.index("j");
        int dd = register_form.layout.index("d");
        for (const auto& [label, amp] : register_form.terms)
            k(int(label[ii]), int(label[jj])) = fixedpoint::decode_signed(label[dd], format);
        return k;
    }
};

inline RegisterLayout gram_layout(int n, const FpFormat& fmt) {
    int ib = qfloyd::index_bits(n), l = fmt.total_bits;
    return RegisterLayout{
        {{"i", ib}, {"j", ib}, {"d", l}, {"m4", l}, {"m5", l}, {"m6", l}, {"one", l}}};
}

// The centering circuit: load the negated means in two's complement, sum into
// the payload register, halve, negate, uncompute the loads. The payload ends
// up holding the code of k(i,j) = -1/2 (d_ij - d_i* - d_*j + d_**).
inline RegisterState build_gram_register(const std::function<std::uint64_t(int, int)>& d_code,
                                         const MeanEstimates& means, int n, const FpFormat& fmt) {
    RegisterLayout lay = gram_layout(n, fmt);
    RegisterState s = regsim::init_uniform(lay, n, "i", "j", "d", d_code, 384);
    int ii = lay.index("i"), jj = lay.index("j");
    std::uint64_t m = fixedpoint::mask(fmt);

    // means quantized to the register format, negated rows/columns
    std::vector<std::uint64_t> neg_row(n), neg_col(n);
    for (int i = 0; i < n; ++i) {
        neg_row[i] = (~encode_even(means.row[i], fmt) + 1) & m;
        neg_col[i] = (~encode_even(means.col[i], fmt) + 1) & m;
    }
    std::uint64_t grand_code = encode_even(means.grand, fmt);

    OpLog log;
    s = regsim::xor_load(s, "m4", [&neg_row, ii](const Label& l) { return neg_row[l[ii]]; }, &log);
    s = regsim::xor_load(s, "m5", [&neg_col, jj](const Label& l) { return neg_col[l[jj]]; }, &log);
    s = regsim::xor_load(s, "m6", [grand_code](const Label&) { return grand_code; }, &log);
    s = regsim::xor_load(s, "one", [](const Label&) { return std::uint64_t(1); }, &log);

    s = regsim::add_into(s, "m4", {"d"});
    s = regsim::add_into(s, "m5", {"d"});
    s = regsim::add_into(s, "m6", {"d"});
    s = regsim::shift_right(s, "d");
    s = regsim::bit_flip(s, "d");
    s = regsim::add_into(s, "one", {"d"});

    return regsim::uncompute(s, log, {"m4", "m5", "m6", "one"});
}

inline GramState build_gram_amplitude(const RegisterState& reg, int n, const FpFormat& fmt) {
    GramState g;
    g.n = n;
    g.format = fmt;
    g.register_form = reg;
    double c = 0;
    int dd = reg.layout.index("d");
    for (const auto& [label, amp] : reg.terms) {
        double v = fixedpoint::decode_signed(label[dd], fmt);
        c += v * v;
    }
    g.normalizer = c;
    auto [amp_state, p2] = regsim::qdac_amplitude(
        reg, "d", regsim::QdacMode::Linear,
        [fmt](std::uint64_t raw) { return fixedpoint::decode_signed(raw, fmt); });
    g.amplitude_form = amp_state;
    g.qdac_success = p2;
    return g;
}

}  // namespace qisomap::gramprep
