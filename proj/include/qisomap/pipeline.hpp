#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qisomap/dataset.hpp"
#include "qisomap/errors.hpp"
#include "qisomap/fixedpoint.hpp"
#include "qisomap/gramprep.hpp"
#include "qisomap/linalg.hpp"
#include "qisomap/oracle.hpp"
#include "qisomap/qfloyd.hpp"
#include "qisomap/qsve.hpp"
#include "qisomap/rng.hpp"

namespace qisomap::pipeline {

using fixedpoint::FpFormat;

struct RunConfig {
    // dataset source: a generator name, or a points CSV path (overrides it)
    std::string generator = "swiss_roll";
    std::string points_csv;
    int n = 16;
    double noise = 0.0;

    int knn_k = 5;
    int target_dim = 2;

    int fp_total_bits = 0;      // 0 = auto via choose_format
    int fp_fraction_bits = 8;   // f

    int phase_bits = 12;        // t
    double eta = 0.95;

    long mean_sample_cap = 10000000;
    double mean_epsilon_frac = 0.05;  // epsilon = frac * max stored value
    double mean_delta = 0.05;
    long spectrum_shots = 10000;
    long tomography_copies = 1000000;

    bool exact_means = true;
    bool square_distances = true;
    bool sign_oracle = true;
    bool allow_disconnected = false;

    std::uint64_t seed = 7;
};

struct StageTimings {
    double floyd_ms = 0;
    double gram_ms = 0;
    double qsve_ms = 0;
    double classical_ms = 0;
};

struct RunReport {
    Mat embedding_classical;
    Mat embedding_quantum;
    double procrustes_error = 0;
    double procrustes_relative = 0;  // error / ||Z_classical||_F
    double pearson = 0;              // geodesic vs embedded distances

    bool floyd_bit_exact = false;
    double p1 = 0;  // Floyd QDAC success probability
    double p2 = 0;  // Gram QDAC success probability
    double dirty_amplitude = 0;
    double max_eigenvalue_error = 0;
    double eta_classical = 0;
    double eta_quantum = 0;
    bool invariants_ok = false;

    gramprep::MeanEstimates means;
    qsve::SpectralReadout readout;
    FpFormat floyd_format;
    FpFormat gram_format;
    StageTimings timings;
    std::uint64_t seed = 0;
    int n = 0;
};

// Residual after the optimal orthogonal alignment of a onto b (no scaling).
inline double procrustes_error(const Mat& a, const Mat& b) {
    Svd s = svd_small(a.transpose() * b);
    Mat r = s.u * s.v.transpose();
    return (a * r - b).frobenius();
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 1.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0;
    return sxy / std::sqrt(sxx * syy);
}

// The full run: k-NN graph -> quantum Floyd -> Gram preparation -> QSVE,
// with the classical oracle running on the identical quantized adjacency.
inline RunReport run_pipeline(const Mat& points, const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    RunReport rep;
    rep.seed = cfg.seed;
    const int n = points.rows();
    rep.n = n;

    Mat adj = dataset::knn_adjacency(points, cfg.knn_k);
    if (!dataset::is_connected(adj) && !cfg.allow_disconnected)
        throw DisconnectedGraph("k-NN graph is disconnected (pass the override to proceed)");

    double max_edge = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::isfinite(adj(i, j))) max_edge = std::max(max_edge, adj(i, j));

    FpFormat floyd_fmt;
    if (cfg.fp_total_bits > 0) {
        floyd_fmt.total_bits = cfg.fp_total_bits;
        floyd_fmt.fraction_bits = cfg.fp_fraction_bits;
    } else {
        floyd_fmt = fixedpoint::choose_format(max_edge, n, cfg.fp_fraction_bits);
    }
    rep.floyd_format = floyd_fmt;

    // --- shortest paths ---
    auto t0 = clock::now();
    qfloyd::AdjacencyInput qadj = qfloyd::quantize_adjacency(adj, floyd_fmt);
    qfloyd::GeodesicState geo = qfloyd::run_quantum_floyd(qadj);
    rep.p1 = geo.qdac_success;
    auto t1 = clock::now();
    rep.timings.floyd_ms = ms(t0, t1);

    Mat geo_classical = qfloyd::classical_floyd(qadj);
    auto qtable = qfloyd::read_distance_table(geo.register_form, n);
    rep.floyd_bit_exact = true;
    Mat geod(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double qv = fixedpoint::decode_raw(qtable[std::size_t(i) * n + j], floyd_fmt);
            geod(i, j) = qv;
            std::uint64_t cref = std::isinf(geo_classical(i, j))
                                     ? floyd_fmt.sentinel_max()
                                     : fixedpoint::encode(geo_classical(i, j), floyd_fmt).raw;
            if (cref != qtable[std::size_t(i) * n + j]) rep.floyd_bit_exact = false;
        }
    rep.dirty_amplitude = regsim::dirty_amplitude(geo.register_form, qfloyd::floyd_ancillas());

    if (geo.disconnected) {
        // sentinel distances are meaningless downstream; substitute the largest
        // finite value so an override run still produces an embedding
        double big = floyd_fmt.range() / 4.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!std::isfinite(geod(i, j))) geod(i, j) = big;
    }

    // --- Gram preparation ---
    t0 = clock::now();
    double gmax = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gmax = std::max(gmax, geod(i, j));
    double vmax = cfg.square_distances ? gmax * gmax : gmax;
    FpFormat gram_fmt = fixedpoint::choose_format(vmax, n, cfg.fp_fraction_bits + 1);
    rep.gram_format = gram_fmt;

    // stored register values: squared (or raw) geodesics, quantized with an
    // even LSB so the centering circuit's halving is exact
    std::vector<std::uint64_t> value_codes(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = cfg.square_distances ? geod(i, j) * geod(i, j) : geod(i, j);
            value_codes[std::size_t(i) * n + j] = gramprep::encode_even(v, gram_fmt);
        }
    auto value_code = [&value_codes, n](int i, int j) { return value_codes[std::size_t(i) * n + j]; };
    auto value_decoded = [&value_codes, n, &gram_fmt](int i, int j) {
        return fixedpoint::decode_signed(value_codes[std::size_t(i) * n + j], gram_fmt);
    };

    gramprep::MeanEstimates means;
    if (cfg.exact_means) {
        means = gramprep::exact_means(value_decoded, n);
    } else {
        // amplitude-encoded state over the stored values, for sampling
        qfloyd::GeodesicState d2;
        d2.n = n;
        d2.format = gram_fmt;
        regsim::RegisterLayout lay{{{"i", qfloyd::index_bits(n)},
                                    {"j", qfloyd::index_bits(n)},
                                    {"d", gram_fmt.total_bits}}};
        regsim::RegisterState reg = regsim::init_uniform(lay, n, "i", "j", "d", value_code);
        double g = 0, vm = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                g += value_decoded(i, j);
                vm = std::max(vm, value_decoded(i, j));
            }
        d2.normalizer = g;
        auto [amp, p] = regsim::qdac_amplitude(reg, "d", regsim::QdacMode::Sqrt,
                                               [&gram_fmt](std::uint64_t raw) {
                                                   return fixedpoint::decode_signed(raw, gram_fmt);
                                               });
        d2.amplitude_form = amp;
        auto rng = stage_rng(cfg.seed, "means");
        means = gramprep::estimate_means(d2, cfg.mean_epsilon_frac * vm, cfg.mean_delta,
                                         cfg.mean_sample_cap, rng);
    }
    rep.means = means;

    regsim::RegisterState gram_reg = gramprep::build_gram_register(value_code, means, n, gram_fmt);
    rep.dirty_amplitude = std::max(
        rep.dirty_amplitude, regsim::dirty_amplitude(gram_reg, {"m4", "m5", "m6", "one"}));
    gramprep::GramState gram = gramprep::build_gram_amplitude(gram_reg, n, gram_fmt);
    rep.p2 = gram.qdac_success;
    t1 = clock::now();
    rep.timings.gram_ms = ms(t0, t1);

    // --- classical oracle on the identical quantized geodesics ---
    t0 = clock::now();
    oracle::GramMatrix kc = oracle::center_distances(geod, cfg.square_distances);
    oracle::EigenSystem eig_c = oracle::eigendecompose(kc);
    oracle::EmbeddingResult emb_c = oracle::embed(eig_c, cfg.target_dim);
    rep.eta_classical = emb_c.explained_ratio;
    rep.embedding_classical = emb_c.z;
    t1 = clock::now();
    rep.timings.classical_ms = ms(t0, t1);

    // --- eigensolution via the walk operator ---
    t0 = clock::now();
    Mat kq = gram.decode();
    qsve::QsveParams qp;
    qp.t = cfg.phase_bits;
    qp.eta = cfg.eta;
    qp.shots = cfg.spectrum_shots;
    qp.copies = cfg.tomography_copies;
    qp.sign_oracle = cfg.sign_oracle;
    auto qrng = stage_rng(cfg.seed, "qsve");
    qsve::SpectralReadout rd = qsve::run_qsve(kq, qp, qrng);
    rd.seed = cfg.seed;
    rep.readout = rd;
    oracle::EmbeddingResult emb_q = qsve::assemble_embedding(rd, cfg.target_dim);
    rep.embedding_quantum = emb_q.z;
    rep.eta_quantum = emb_q.explained_ratio;
    t1 = clock::now();
    rep.timings.qsve_ms = ms(t0, t1);

    for (std::size_t c = 0; c < rd.entries.size() && c < eig_c.values.size(); ++c)
        rep.max_eigenvalue_error = std::max(
            rep.max_eigenvalue_error, std::fabs(rd.entries[c].sigma_est - eig_c.values[c]));

    rep.procrustes_error = procrustes_error(rep.embedding_quantum, rep.embedding_classical);
    double zc_norm = rep.embedding_classical.frobenius();
    rep.procrustes_relative = zc_norm > 0 ? rep.procrustes_error / zc_norm : 0;

    std::vector<double> gx, ex;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            gx.push_back(geod(i, j));
            double s = 0;
            for (int c = 0; c < rep.embedding_quantum.cols(); ++c) {
                double dd = rep.embedding_quantum(i, c) - rep.embedding_quantum(j, c);
                s += dd * dd;
            }
            ex.push_back(std::sqrt(s));
        }
    rep.pearson = pearson_correlation(gx, ex);

    rep.invariants_ok = rep.floyd_bit_exact && rep.dirty_amplitude < 1e-12;
    return rep;
}

}  // namespace qisomap::pipeline
