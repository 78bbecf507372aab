#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "qisomap/errors.hpp"
#include "qisomap/linalg.hpp"
#include "qisomap/oracle.hpp"

namespace qisomap::qsve {

// Walk operator W = (2 N N^T - I)(2 M M^T - I) built from the two isometries
// of the singular value estimation construction. Index convention for the
// N^2-dimensional space: |i>|j> -> i*n + j.
struct WalkOperator {
    int n = 0;
    Mat k;       // the Gram matrix the walk encodes
    Mat m_iso;   // n^2 x n
    Mat n_iso;   // n^2 x n
    Mat w;       // n^2 x n^2
    double frob = 0;
};

inline WalkOperator build_walk(const Mat& k) {
    const int n = k.rows();
    WalkOperator wo;
    wo.n = n;
    wo.k = k;
    wo.frob = k.frobenius();
    if (wo.frob == 0) throw ZeroColumn("build_walk: zero matrix");

    std::vector<double> colnorm(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += k(i, j) * k(i, j);
        colnorm[j] = std::sqrt(s);
    }

    wo.m_iso = Mat(n * n, n);
    wo.n_iso = Mat(n * n, n);
    for (int j = 0; j < n; ++j) {
        if (colnorm[j] > 0) {
            for (int i = 0; i < n; ++i) wo.m_iso(i * n + j, j) = k(i, j) / colnorm[j];
        } else {
            // zero column: |K_j> := |j> keeps the map an isometry and
            // contributes nothing to N^T M
            wo.m_iso(j * n + j, j) = 1.0;
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) wo.n_iso(i * n + j, i) = colnorm[j] / wo.frob;

    Mat mmT = wo.m_iso * wo.m_iso.transpose();
    Mat nnT = wo.n_iso * wo.n_iso.transpose();
    Mat refM = mmT.scaled(2.0) - Mat::identity(n * n);
    Mat refN = nnT.scaled(2.0) - Mat::identity(n * n);
    wo.w = refN * refM;
    return wo;
}

struct SubspaceCheck {
    double sigma = 0;
    double cos_theta = 0;        // sigma / ||K||_F
    double cos_theta_measured = 0;  // cos of the eigenphase read off W's rotation
    double rotation_residual = 0;  // || W e1 - (cos2t e1 + sin2t e2) ||
    double cos2_error = 0;         // | <e1|W|e1> - (2 sigma^2/F^2 - 1) |
    bool degenerate = false;       // sigma == ||K||_F branch
};

struct SubspaceReport {
    std::vector<SubspaceCheck> checks;
    double max_residual = 0;
    double isometry_m = 0;     // || M^T M - I ||_F
    double isometry_n = 0;     // || N^T N - I ||_F
    double stochastic = 0;     // || N^T M - K/F ||_F
    double reflection_m = 0;   // || (2MM^T - I)^2 - I ||_F
    double reflection_n = 0;
};

// Checks that each eigenpair of K spans a two-dimensional subspace on which W
// acts as a rotation by 2 theta_k with cos theta_k = sigma_k / ||K||_F.
inline SubspaceReport verify_invariant_subspace(const WalkOperator& wo,
                                                const oracle::EigenSystem& eig) {
    const int n = wo.n;
    SubspaceReport rep;
    Mat id_n = Mat::identity(n);
    rep.isometry_m = (wo.m_iso.transpose() * wo.m_iso - id_n).frobenius();
    rep.isometry_n = (wo.n_iso.transpose() * wo.n_iso - id_n).frobenius();
    rep.stochastic = (wo.n_iso.transpose() * wo.m_iso - wo.k.scaled(1.0 / wo.frob)).frobenius();
    Mat refM = (wo.m_iso * wo.m_iso.transpose()).scaled(2.0) - Mat::identity(n * n);
    Mat refN = (wo.n_iso * wo.n_iso.transpose()).scaled(2.0) - Mat::identity(n * n);
    rep.reflection_m = (refM * refM - Mat::identity(n * n)).frobenius();
    rep.reflection_n = (refN * refN - Mat::identity(n * n)).frobenius();

    for (int c = 0; c < n; ++c) {
        double lambda = eig.values[c];
        double sigma = std::fabs(lambda);
        SubspaceCheck chk;
        chk.sigma = sigma;
        chk.cos_theta = sigma / wo.frob;
        std::vector<double> v = eig.vectors.col(c);
        std::vector<double> u = v;
        if (lambda < 0)
            for (double& x : u) x = -x;

        std::vector<double> e1 = matvec(wo.m_iso, v);
        std::vector<double> we1 = matvec(wo.w, e1);
        double ip = dot(e1, we1);
        double cos2t = 2.0 * chk.cos_theta * chk.cos_theta - 1.0;
        chk.cos2_error = std::fabs(ip - cos2t);

        double disc = 1.0 - chk.cos_theta * chk.cos_theta;
        if (disc < 1e-14) {
            // sigma = ||K||_F: the rank-one case, M|v> is a fixed point of W
            chk.degenerate = true;
            chk.cos_theta_measured = std::cos(0.5 * std::atan2(0.0, ip));
            std::vector<double> r = we1;
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= e1[i];
            chk.rotation_residual = norm2(r);
        } else {
            std::vector<double> nu = matvec(wo.n_iso, u);
            std::vector<double> e2(nu.size());
            double denom = std::sqrt(disc);
            for (std::size_t i = 0; i < nu.size(); ++i)
                e2[i] = (nu[i] - chk.cos_theta * e1[i]) / denom;
            double sin2t = 2.0 * chk.cos_theta * denom;
            // the eigenphase W actually realizes, read off both rotation
            // components; atan2 keeps the readout stable for sigma near zero
            chk.cos_theta_measured = std::cos(0.5 * std::atan2(dot(e2, we1), ip));
            std::vector<double> r = we1;
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] -= cos2t * e1[i] + sin2t * e2[i];
            chk.rotation_residual = norm2(r);
        }
        rep.max_residual = std::max(rep.max_residual, chk.rotation_residual);
        rep.checks.push_back(chk);
    }
    return rep;
}

// One eigencomponent after phase estimation: the +-theta branches carry a
// t-bit binned phase label.
struct PhaseBranch {
    int k = 0;            // eigenpair index into the classical decomposition
    double sigma = 0;     // |lambda_k|
    double theta = 0;     // arccos(sigma / F)
    double theta_bin = 0; // t-bit rounding of theta
    long bin_index = 0;   // round(theta * 2^t / 2pi)
    double weight = 0;    // sigma_k^2 / F^2, the sampling probability
};

struct PhaseEstimate {
    std::vector<PhaseBranch> branches;
    oracle::EigenSystem eig;
    double frob = 0;
    int t = 0;
};

// Phase estimation simulated by exact diagonalization plus ideal t-bit
// binning: theta_bin = round(theta 2^t / 2pi) 2pi / 2^t.
inline PhaseEstimate phase_estimate(const WalkOperator& wo, int t) {
    PhaseEstimate pe;
    pe.t = t;
    pe.frob = wo.frob;
    pe.eig = oracle::eigendecompose(oracle::GramMatrix{wo.k});
    const double two_pi = 2.0 * M_PI;
    double wsum = 0;
    for (int c = 0; c < wo.n; ++c) {
        double sigma = std::fabs(pe.eig.values[c]);
        PhaseBranch b;
        b.k = c;
        b.sigma = sigma;
        double ratio = std::min(1.0, sigma / wo.frob);
        b.theta = std::acos(ratio);
        b.bin_index = std::lround(b.theta * std::ldexp(1.0, t) / two_pi);
        b.theta_bin = double(b.bin_index) * two_pi / std::ldexp(1.0, t);
        b.weight = (sigma * sigma) / (wo.frob * wo.frob);
        wsum += b.weight;
        pe.branches.push_back(b);
    }
    // amplitudes sigma_k/F of Eq-form |K> already sum to one in probability;
    // renormalize defensively against the binning of near-zero sigmas
    if (wsum > 0)
        for (auto& b : pe.branches) b.weight /= wsum;
    return pe;
}

// Result of the cosine oracle + un-phase-estimation: each branch carries an
// eigenvalue readout F * cos(theta_bin); the +-theta branches merge since the
// cosine is even.
struct SpectralComponent {
    int k = 0;
    long bin_index = 0;
    double theta_bin = 0;
    double cos_bin = 0;
    double sigma_est = 0;  // F * cos_bin
    double sigma = 0;      // true singular value (simulator-side reference)
    double weight = 0;
};

struct SpectralState {
    std::vector<SpectralComponent> components;
    oracle::EigenSystem eig;
    double frob = 0;
    int t = 0;
};

inline SpectralState cosine_oracle(const PhaseEstimate& pe) {
    SpectralState st;
    st.eig = pe.eig;
    st.frob = pe.frob;
    st.t = pe.t;
    for (const auto& b : pe.branches) {
        SpectralComponent c;
        c.k = b.k;
        c.bin_index = b.bin_index;
        c.theta_bin = b.theta_bin;
        c.cos_bin = std::cos(b.theta_bin);
        c.sigma_est = pe.frob * c.cos_bin;
        c.sigma = b.sigma;
        c.weight = b.weight;
        st.components.push_back(c);
    }
    return st;
}

struct SpectralEntry {
    int k = 0;             // contributing eigenpair
    long bin_index = 0;
    double theta_bin = 0;
    double sigma_est = 0;
    double weight = 0;     // empirical share of shots
    std::vector<double> vector;  // tomography estimate, filled later
};

struct SpectralReadout {
    std::vector<SpectralEntry> entries;  // descending sigma_est
    int t = 0;
    double eta = 0;
    double frob = 0;
    long shots = 0;
    std::uint64_t seed = 0;
};

// Measures the eigenvalue register `shots` times, keeps the smallest set of
// distinct outcomes whose cumulative empirical weight reaches eta, and expands
// degenerate bins into their contributing eigencomponents.
inline SpectralReadout sample_spectrum(const SpectralState& st, long shots, double eta,
                                       std::mt19937_64& rng) {
    std::vector<double> probs;
    for (const auto& c : st.components) probs.push_back(c.weight);
    std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
    std::map<long, long> bin_counts;
    for (long s = 0; s < shots; ++s) {
        const auto& c = st.components[dist(rng)];
        ++bin_counts[c.bin_index];
    }
    std::vector<std::pair<long, double>> bins;  // (bin, empirical weight)
    for (const auto& [bin, cnt] : bin_counts) bins.emplace_back(bin, double(cnt) / shots);
    std::sort(bins.begin(), bins.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });

    SpectralReadout rd;
    rd.t = st.t;
    rd.eta = eta;
    rd.frob = st.frob;
    rd.shots = shots;
    double cum = 0;
    std::vector<long> selected;
    for (const auto& [bin, w] : bins) {
        selected.push_back(bin);
        cum += w;
        if (cum >= eta) break;
    }
    if (cum < eta)
        throw ShotBudgetTooSmall("sample_spectrum: observed outcomes cover " +
                                 std::to_string(cum) + " < eta");

    for (long bin : selected) {
        double bin_weight_true = 0;
        for (const auto& c : st.components)
            if (c.bin_index == bin) bin_weight_true += c.weight;
        for (const auto& c : st.components) {
            if (c.bin_index != bin || c.weight <= 0) continue;
            SpectralEntry e;
            e.k = c.k;
            e.bin_index = bin;
            e.theta_bin = c.theta_bin;
            e.sigma_est = c.sigma_est;
            // split the empirical bin weight across degenerate components
            e.weight = (double(bin_counts[bin]) / shots) * (c.weight / bin_weight_true);
            rd.entries.push_back(e);
        }
    }
    std::sort(rd.entries.begin(), rd.entries.end(),
              [](const SpectralEntry& a, const SpectralEntry& b) {
                  return a.sigma_est > b.sigma_est;
              });
    return rd;
}

// Standard-basis tomography of the post-selected eigenvector: magnitudes from
// counts, signs from the simulator's exact amplitudes when the sign oracle is
// on (all-plus otherwise).
inline std::vector<double> tomography(const SpectralState& st, int k, long copies,
                                      std::mt19937_64& rng, bool sign_oracle) {
    const int n = st.eig.vectors.rows();
    if (copies < 1) throw InsufficientCopies("tomography: no copies");
    std::vector<double> exact = st.eig.vectors.col(k);
    std::vector<double> probs(n);
    for (int i = 0; i < n; ++i) probs[i] = exact[i] * exact[i];
    std::discrete_distribution<int> dist(probs.begin(), probs.end());
    std::vector<long> counts(n, 0);
    for (long c = 0; c < copies; ++c) ++counts[dist(rng)];
    std::vector<double> est(n);
    for (int i = 0; i < n; ++i) {
        if (counts[i] == 0 && std::fabs(exact[i]) > 0.05)
            throw InsufficientCopies("tomography: component " + std::to_string(i) +
                                     " unresolved at " + std::to_string(copies) + " copies");
        est[i] = std::sqrt(double(counts[i]) / copies);
        if (sign_oracle && exact[i] < 0) est[i] = -est[i];
    }
    return est;
}

// Z column c = v_c sqrt(lambda_c) with lambda_c = F cos(theta_bin).
inline oracle::EmbeddingResult assemble_embedding(const SpectralReadout& rd, int d) {
    if (static_cast<int>(rd.entries.size()) < d)
        throw InsufficientPositiveSpectrum("assemble_embedding: fewer outcomes than d");
    int n = static_cast<int>(rd.entries.empty() ? 0 : rd.entries[0].vector.size());
    oracle::EmbeddingResult r;
    if (d == 0) {
        r.z = Mat(n, 0);
        return r;
    }
    r.z = Mat(n, d);
    double num = 0, den = 0;
    for (const auto& e : rd.entries) {
        double l = std::max(e.sigma_est, 0.0);
        den += l * l;
    }
    for (int c = 0; c < d; ++c) {
        const auto& e = rd.entries[c];
        if (e.sigma_est <= 0)
            throw InsufficientPositiveSpectrum("assemble_embedding: nonpositive eigenvalue readout");
        if (static_cast<int>(e.vector.size()) != n)
            throw InsufficientCopies("assemble_embedding: missing tomography vector");
        double s = std::sqrt(e.sigma_est);
        for (int i = 0; i < n; ++i) r.z(i, c) = e.vector[i] * s;
        r.values.push_back(e.sigma_est);
        num += e.sigma_est * e.sigma_est;
    }
    r.explained_ratio = den > 0 ? num / den : 0;
    return r;
}

struct QsveParams {
    int t = 10;           // phase-register precision bits
    double eta = 0.95;
    long shots = 10000;
    long copies = 100000;
    bool sign_oracle = true;
};

// Full eigensolution stage on a Gram matrix: walk, phase estimation, cosine
// readout, spectrum sampling, tomography.
inline SpectralReadout run_qsve(const Mat& k, const QsveParams& p, std::mt19937_64& rng) {
    WalkOperator wo = build_walk(k);
    PhaseEstimate pe = phase_estimate(wo, p.t);
    SpectralState st = cosine_oracle(pe);
    SpectralReadout rd = sample_spectrum(st, p.shots, p.eta, rng);
    for (auto& e : rd.entries) e.vector = tomography(st, e.k, p.copies, rng, p.sign_oracle);
    return rd;
}

}  // namespace qisomap::qsve
