#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qisomap/dataset.hpp"
#include "qisomap/io.hpp"
#include "qisomap/pipeline.hpp"

using namespace qisomap;
using namespace qisomap::pipeline;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

RunConfig circle_config() {
    RunConfig cfg;
    cfg.generator = "circle";
    cfg.n = 8;
    cfg.knn_k = 2;
    cfg.target_dim = 2;
    cfg.phase_bits = 12;
    cfg.spectrum_shots = 20000;
    cfg.tomography_copies = 400000;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST(Procrustes, InvariantUnderRotation) {
    Mat a(4, 2);
    a(0, 0) = 1;
    a(1, 1) = 1;
    a(2, 0) = -1;
    a(3, 1) = -1;
    double th = 0.7;
    Mat b(4, 2);
    for (int i = 0; i < 4; ++i) {
        b(i, 0) = std::cos(th) * a(i, 0) - std::sin(th) * a(i, 1);
        b(i, 1) = std::sin(th) * a(i, 0) + std::cos(th) * a(i, 1);
    }
    EXPECT_NEAR(procrustes_error(a, b), 0.0, 1e-10);
    // reflections are allowed too
    for (int i = 0; i < 4; ++i) b(i, 0) = -b(i, 0);
    EXPECT_NEAR(procrustes_error(a, b), 0.0, 1e-10);
}

TEST(Pearson, PerfectAndAnticorrelated) {
    std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{8, 6, 4, 2};
    EXPECT_NEAR(pearson_correlation(x, y), 1.0, 1e-12);
    EXPECT_NEAR(pearson_correlation(x, z), -1.0, 1e-12);
}

TEST(Pipeline, CircleRunPassesInvariants) {
    RunConfig cfg = circle_config();
    Mat pts = dataset::generate_dataset(cfg.generator, cfg.n, cfg.noise, cfg.seed);
    RunReport rep = run_pipeline(pts, cfg);
    EXPECT_TRUE(rep.floyd_bit_exact);
    EXPECT_LT(rep.dirty_amplitude, 1e-12);
    EXPECT_TRUE(rep.invariants_ok);
    EXPECT_GT(rep.p1, 0.0);
    EXPECT_GT(rep.p2, 0.0);
    EXPECT_LT(rep.procrustes_relative, 0.05);
    EXPECT_GT(rep.pearson, 0.9);
}

TEST(Pipeline, SampledMeansModeRuns) {
    RunConfig cfg = circle_config();
    cfg.exact_means = false;
    cfg.mean_epsilon_frac = 0.05;
    Mat pts = dataset::generate_dataset(cfg.generator, cfg.n, cfg.noise, cfg.seed);
    RunReport rep = run_pipeline(pts, cfg);
    EXPECT_FALSE(rep.means.exact);
    EXPECT_GT(rep.means.samples, 0);
    EXPECT_TRUE(rep.floyd_bit_exact);
}

TEST(Pipeline, DisconnectedGraphRejectedWithoutOverride) {
    // two distant clusters with k=1 stay disconnected
    Mat pts(4, 2);
    pts(0, 0) = 0;
    pts(1, 0) = 0.1;
    pts(2, 0) = 100;
    pts(3, 0) = 100.1;
    RunConfig cfg = circle_config();
    cfg.n = 4;
    cfg.knn_k = 1;
    EXPECT_THROW(run_pipeline(pts, cfg), DisconnectedGraph);
}

TEST(Pipeline, DeterministicForFixedSeed) {
    RunConfig cfg = circle_config();
    cfg.exact_means = false;
    Mat pts = dataset::generate_dataset(cfg.generator, cfg.n, cfg.noise, cfg.seed);
    RunReport a = run_pipeline(pts, cfg);
    RunReport b = run_pipeline(pts, cfg);
    EXPECT_EQ(a.procrustes_error, b.procrustes_error);
    EXPECT_EQ(a.pearson, b.pearson);
    for (int i = 0; i < a.embedding_quantum.rows(); ++i)
        for (int c = 0; c < a.embedding_quantum.cols(); ++c)
            EXPECT_EQ(a.embedding_quantum(i, c), b.embedding_quantum(i, c));
}

TEST(Artifacts, ByteIdenticalAcrossReruns) {
    RunConfig cfg = circle_config();
    Mat pts = dataset::generate_dataset(cfg.generator, cfg.n, cfg.noise, cfg.seed);
    auto dir1 = std::filesystem::temp_directory_path() / "qisomap_art1";
    auto dir2 = std::filesystem::temp_directory_path() / "qisomap_art2";
    io::emit_artifacts(run_pipeline(pts, cfg), cfg, dir1.string());
    io::emit_artifacts(run_pipeline(pts, cfg), cfg, dir2.string());
    for (const char* name : {"embedding_classical.csv", "embedding_quantum.csv", "metrics.json",
                             "diagnostics.json", "config.json"}) {
        std::string a = slurp((dir1 / name).string());
        std::string b = slurp((dir2 / name).string());
        EXPECT_FALSE(a.empty());
        EXPECT_EQ(a, b) << name;
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST(Io, MatrixCsvRoundTripWithInfinity) {
    Mat m(2, 3);
    m(0, 0) = 1.5;
    m(0, 1) = std::numeric_limits<double>::infinity();
    m(0, 2) = -0.125;
    m(1, 0) = 1.0 / 3.0;
    m(1, 1) = 1e-17;
    m(1, 2) = -7;
    auto path = (std::filesystem::temp_directory_path() / "qisomap_mat.csv").string();
    io::write_matrix_csv(m, path);
    Mat back = io::read_matrix_csv(path);
    ASSERT_EQ(back.rows(), 2);
    ASSERT_EQ(back.cols(), 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            if (std::isinf(m(i, j)))
                EXPECT_TRUE(std::isinf(back(i, j)));
            else
                EXPECT_EQ(back(i, j), m(i, j));  // %.17g is lossless for doubles
        }
    std::remove(path.c_str());
}

TEST(Io, PointsCsvRoundTrip) {
    Mat pts = dataset::generate_dataset("s_curve", 10, 0.0, 3);
    auto path = (std::filesystem::temp_directory_path() / "qisomap_pts.csv").string();
    io::write_points_csv(pts, path);
    Mat back = io::read_points_csv(path);
    ASSERT_EQ(back.rows(), pts.rows());
    ASSERT_EQ(back.cols(), pts.cols());
    for (int i = 0; i < pts.rows(); ++i)
        for (int c = 0; c < pts.cols(); ++c) EXPECT_EQ(back(i, c), pts(i, c));
    std::remove(path.c_str());
}

TEST(Io, ConfigJsonRoundTrip) {
    RunConfig cfg = circle_config();
    cfg.exact_means = false;
    cfg.fp_total_bits = 20;
    cfg.mean_sample_cap = 12345;
    cfg.points_csv = "some/points.csv";
    RunConfig back = io::config_from_json(io::config_to_json(cfg));
    EXPECT_EQ(back.generator, cfg.generator);
    EXPECT_EQ(back.points_csv, cfg.points_csv);
    EXPECT_EQ(back.n, cfg.n);
    EXPECT_EQ(back.knn_k, cfg.knn_k);
    EXPECT_EQ(back.target_dim, cfg.target_dim);
    EXPECT_EQ(back.fp_total_bits, cfg.fp_total_bits);
    EXPECT_EQ(back.fp_fraction_bits, cfg.fp_fraction_bits);
    EXPECT_EQ(back.phase_bits, cfg.phase_bits);
    EXPECT_EQ(back.mean_sample_cap, cfg.mean_sample_cap);
    EXPECT_EQ(back.spectrum_shots, cfg.spectrum_shots);
    EXPECT_EQ(back.tomography_copies, cfg.tomography_copies);
    EXPECT_EQ(back.exact_means, cfg.exact_means);
    EXPECT_EQ(back.seed, cfg.seed);
}

TEST(Dataset, GeneratorsAreDeterministic) {
    for (const char* name : {"swiss_roll", "s_curve", "circle", "blob"}) {
        Mat a = dataset::generate_dataset(name, 12, 0.1, 5);
        Mat b = dataset::generate_dataset(name, 12, 0.1, 5);
        for (int i = 0; i < a.rows(); ++i)
            for (int c = 0; c < a.cols(); ++c) EXPECT_EQ(a(i, c), b(i, c));
    }
    EXPECT_THROW(dataset::generate_dataset("torus", 8, 0, 1), UnknownGenerator);
    EXPECT_THROW(dataset::generate_dataset("circle", 0, 0, 1), UnknownGenerator);
}

TEST(Dataset, KnnGraphSymmetricAndConnected) {
    Mat pts = dataset::generate_dataset("swiss_roll", 16, 0.0, 7);
    Mat adj = dataset::knn_adjacency(pts, 5);
    for (int i = 0; i < 16; ++i) {
        EXPECT_EQ(adj(i, i), 0.0);
        for (int j = 0; j < 16; ++j) EXPECT_EQ(adj(i, j), adj(j, i));
    }
    EXPECT_TRUE(dataset::is_connected(adj));
}
