#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qisomap/errors.hpp"
#include "qisomap/gramprep.hpp"
#include "qisomap/linalg.hpp"
#include "qisomap/pipeline.hpp"
#include "qisomap/qsve.hpp"

namespace qisomap::io {

using nlohmann::ordered_json;

inline std::string format_value(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Matrices: comma-separated rows, no header, `inf` for non-edges.
inline void write_matrix_csv(const Mat& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) f << ",";
            f << format_value(m(i, j));
        }
        f << "\n";
    }
}

inline Mat read_matrix_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell == "inf" || cell == "Inf" || cell == "INF")
                row.push_back(std::numeric_limits<double>::infinity());
            else
                row.push_back(std::stod(cell));
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw IoError("empty matrix in " + path);
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw IoError("ragged rows in " + path);
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(int(i), int(j)) = rows[i][j];
    }
    return m;
}

// Point sets: header row x0,x1,... then one point per line.
inline void write_points_csv(const Mat& pts, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    for (int c = 0; c < pts.cols(); ++c) f << (c ? ",x" : "x") << c;
    f << "\n";
    for (int i = 0; i < pts.rows(); ++i) {
        for (int j = 0; j < pts.cols(); ++j) {
            if (j) f << ",";
            f << format_value(pts(i, j));
        }
        f << "\n";
    }
}

inline Mat read_points_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw IoError("empty points file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    if (rows.empty()) throw IoError("no points in " + path);
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(int(i), int(j)) = rows[i][j];
    return m;
}

// --- run configuration ---

inline ordered_json config_to_json(const pipeline::RunConfig& c) {
    ordered_json j;
    j["dataset"] = {{"generator", c.generator}, {"csv", c.points_csv},
                    {"n", c.n},                 {"noise", c.noise}};
    j["knn_k"] = c.knn_k;
    j["target_dim"] = c.target_dim;
    j["fp"] = {{"l", c.fp_total_bits}, {"f", c.fp_fraction_bits}};
    j["phase_bits"] = c.phase_bits;
    j["eta"] = c.eta;
    j["budgets"] = {{"mean_sample_cap", c.mean_sample_cap},
                    {"mean_epsilon_frac", c.mean_epsilon_frac},
                    {"mean_delta", c.mean_delta},
                    {"spectrum_shots", c.spectrum_shots},
                    {"tomography_copies", c.tomography_copies}};
    j["modes"] = {{"exact_means", c.exact_means},
                  {"square_distances", c.square_distances},
                  {"sign_oracle", c.sign_oracle},
                  {"allow_disconnected", c.allow_disconnected}};
    j["seed"] = c.seed;
    return j;
}

inline pipeline::RunConfig config_from_json(const ordered_json& j) {
    pipeline::RunConfig c;
    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        c.generator = d.value("generator", c.generator);
        c.points_csv = d.value("csv", c.points_csv);
        c.n = d.value("n", c.n);
        c.noise = d.value("noise", c.noise);
    }
    c.knn_k = j.value("knn_k", c.knn_k);
    c.target_dim = j.value("target_dim", c.target_dim);
    if (j.contains("fp")) {
        c.fp_total_bits = j["fp"].value("l", c.fp_total_bits);
        c.fp_fraction_bits = j["fp"].value("f", c.fp_fraction_bits);
    }
    c.phase_bits = j.value("phase_bits", c.phase_bits);
    c.eta = j.value("eta", c.eta);
    if (j.contains("budgets")) {
        const auto& b = j["budgets"];
        c.mean_sample_cap = b.value("mean_sample_cap", c.mean_sample_cap);
        c.mean_epsilon_frac = b.value("mean_epsilon_frac", c.mean_epsilon_frac);
        c.mean_delta = b.value("mean_delta", c.mean_delta);
        c.spectrum_shots = b.value("spectrum_shots", c.spectrum_shots);
        c.tomography_copies = b.value("tomography_copies", c.tomography_copies);
    }
    if (j.contains("modes")) {
        const auto& m = j["modes"];
        c.exact_means = m.value("exact_means", c.exact_means);
        c.square_distances = m.value("square_distances", c.square_distances);
        c.sign_oracle = m.value("sign_oracle", c.sign_oracle);
        c.allow_disconnected = m.value("allow_disconnected", c.allow_disconnected);
    }
    c.seed = j.value("seed", c.seed);
    return c;
}

inline pipeline::RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config " + path);
    ordered_json j;
    f >> j;
    return config_from_json(j);
}

inline ordered_json means_to_json(const gramprep::MeanEstimates& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.row.size(); ++i)
        rows.push_back({{"i", i}, {"estimate", m.row[i]}, {"samples", m.samples}});
    return {{"rows", rows}, {"grand", m.grand}, {"exact", m.exact},
            {"epsilon", m.epsilon}, {"delta", m.delta}};
}

inline ordered_json readout_to_json(const qsve::SpectralReadout& rd) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : rd.entries)
        entries.push_back({{"sigma", e.sigma_est},
                           {"theta_bin", e.theta_bin},
                           {"weight", e.weight},
                           {"vector", e.vector}});
    return {{"entries", entries}, {"t", rd.t}, {"eta", rd.eta},
            {"shots", rd.shots}, {"seed", rd.seed}};
}

// Writes embedding_classical.csv, embedding_quantum.csv, metrics.json,
// diagnostics.json and the config echo. Returns false when a stage invariant
// failed (the CLI turns that into a nonzero exit code).
inline bool emit_artifacts(const pipeline::RunReport& rep, const pipeline::RunConfig& cfg,
                           const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto p = [&out_dir](const char* name) { return out_dir + "/" + name; };
    write_matrix_csv(rep.embedding_classical, p("embedding_classical.csv"));
    write_matrix_csv(rep.embedding_quantum, p("embedding_quantum.csv"));

    ordered_json metrics = {
        {"procrustes_error", rep.procrustes_error},
        {"procrustes_relative", rep.procrustes_relative},
        {"pearson", rep.pearson},
        {"eta_classical", rep.eta_classical},
        {"eta_quantum", rep.eta_quantum},
        {"seed", rep.seed},
    };
    std::ofstream(p("metrics.json")) << metrics.dump(2) << "\n";

    ordered_json diag = {
        {"floyd_bit_exact", rep.floyd_bit_exact},
        {"p1_qdac_success", rep.p1},
        {"p2_qdac_success", rep.p2},
        {"dirty_amplitude", rep.dirty_amplitude},
        {"max_eigenvalue_error", rep.max_eigenvalue_error},
        {"invariants_ok", rep.invariants_ok},
        {"failed_stage", rep.invariants_ok ? ""
                         : (!rep.floyd_bit_exact ? "qfloyd" : "uncompute")},
        {"floyd_format", {{"l", rep.floyd_format.total_bits}, {"f", rep.floyd_format.fraction_bits}}},
        {"gram_format", {{"l", rep.gram_format.total_bits}, {"f", rep.gram_format.fraction_bits}}},
        {"means", means_to_json(rep.means)},
        {"readout", readout_to_json(rep.readout)},
    };
    std::ofstream(p("diagnostics.json")) << diag.dump(2) << "\n";
    // wall-clock lives in its own file so the canonical artifacts stay
    // byte-identical across reruns of the same config+seed
    ordered_json timings = {{"floyd_ms", rep.timings.floyd_ms},
                            {"gram_ms", rep.timings.gram_ms},
                            {"qsve_ms", rep.timings.qsve_ms},
                            {"classical_ms", rep.timings.classical_ms}};
    std::ofstream(p("timings.json")) << timings.dump(2) << "\n";
    std::ofstream(p("config.json")) << config_to_json(cfg).dump(2) << "\n";
    return rep.invariants_ok;
}

}  // namespace qisomap::io
