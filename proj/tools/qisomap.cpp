// Batch front-end: dataset generation, standalone Floyd / classical Isomap
// runs, and the full classical-vs-quantum pipeline with artifact emission.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qisomap/dataset.hpp"
#include "qisomap/io.hpp"
#include "qisomap/oracle.hpp"
#include "qisomap/pipeline.hpp"
#include "qisomap/qfloyd.hpp"

using namespace qisomap;

int main(int argc, char** argv) {
    CLI::App app{"desk-scale quantum Isomap simulator"};
    app.require_subcommand(1);

    // gen --name swiss_roll --n 32 --seed 7 --out pts.csv
    auto* gen = app.add_subcommand("gen", "generate a test dataset");
    std::string gen_name = "swiss_roll", gen_out = "points.csv";
    int gen_n = 32;
    double gen_noise = 0.0;
    std::uint64_t gen_seed = 7;
    gen->add_option("--name", gen_name, "swiss_roll|s_curve|circle|blob");
    gen->add_option("--n", gen_n, "number of points (<= 64)");
    gen->add_option("--noise", gen_noise, "gaussian jitter sigma");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--out", gen_out, "output CSV path");

    // floyd --adj adj.csv --out dist.csv
    auto* floyd = app.add_subcommand("floyd", "quantum Floyd on an adjacency CSV");
    std::string floyd_adj, floyd_out = "dist.csv";
    int floyd_f = 8;
    floyd->add_option("--adj", floyd_adj, "adjacency CSV (inf = non-edge)")->required();
    floyd->add_option("--out", floyd_out, "geodesic distance CSV");
    floyd->add_option("--fraction-bits", floyd_f, "fixed-point fraction bits");

    // classical --pts pts.csv --d 2
    auto* cls = app.add_subcommand("classical", "classical Isomap oracle");
    std::string cls_pts, cls_out = "embedding.csv";
    int cls_d = 2, cls_k = 5;
    cls->add_option("--pts", cls_pts, "points CSV")->required();
    cls->add_option("--d", cls_d, "target dimension");
    cls->add_option("--k", cls_k, "k-NN neighbors");
    cls->add_option("--out", cls_out, "embedding CSV");

    // run --config cfg.json [--out DIR]
    auto* run = app.add_subcommand("run", "full pipeline from a JSON config");
    std::string run_cfg, run_out = "out";
    run->add_option("--config", run_cfg, "RunConfig JSON")->required();
    run->add_option("--out", run_out, "artifact directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Mat pts = dataset::generate_dataset(gen_name, gen_n, gen_noise, gen_seed);
            io::write_points_csv(pts, gen_out);
            std::cout << "wrote " << gen_out << " (" << pts.rows() << " x " << pts.cols() << ")\n";
        } else if (*floyd) {
            Mat adj = io::read_matrix_csv(floyd_adj);
            double max_edge = 0;
            for (int i = 0; i < adj.rows(); ++i)
                for (int j = 0; j < adj.cols(); ++j)
                    if (std::isfinite(adj(i, j))) max_edge = std::max(max_edge, adj(i, j));
            auto fmt = fixedpoint::choose_format(max_edge, adj.rows(), floyd_f);
            auto qadj = qfloyd::quantize_adjacency(adj, fmt);
            auto geo = qfloyd::run_quantum_floyd(qadj);
            if (geo.disconnected)
                std::cerr << "warning: graph is disconnected, sentinel entries remain\n";
            auto table = qfloyd::read_distance_table(geo.register_form, adj.rows());
            Mat out(adj.rows(), adj.cols());
            for (int i = 0; i < adj.rows(); ++i)
                for (int j = 0; j < adj.cols(); ++j)
                    out(i, j) = fixedpoint::decode_raw(table[std::size_t(i) * adj.cols() + j], fmt);
            io::write_matrix_csv(out, floyd_out);
            std::cout << "wrote " << floyd_out << "\n";
        } else if (*cls) {
            Mat pts = io::read_points_csv(cls_pts);
            Mat adj = dataset::knn_adjacency(pts, cls_k);
            if (!dataset::is_connected(adj))
                throw DisconnectedGraph("k-NN graph is disconnected; raise --k");
            double max_edge = 0;
            for (int i = 0; i < adj.rows(); ++i)
                for (int j = 0; j < adj.cols(); ++j)
                    if (std::isfinite(adj(i, j))) max_edge = std::max(max_edge, adj(i, j));
            auto fmt = fixedpoint::choose_format(max_edge, pts.rows(), 8);
            Mat geo = qfloyd::classical_floyd(qfloyd::quantize_adjacency(adj, fmt));
            auto emb = oracle::classical_isomap(geo, cls_d);
            io::write_matrix_csv(emb.z, cls_out);
            std::cout << "wrote " << cls_out << " (eta = " << emb.explained_ratio << ")\n";
        } else if (*run) {
            pipeline::RunConfig cfg = io::load_config(run_cfg);
            Mat pts = cfg.points_csv.empty()
                          ? dataset::generate_dataset(cfg.generator, cfg.n, cfg.noise, cfg.seed)
                          : io::read_points_csv(cfg.points_csv);
            pipeline::RunReport rep = pipeline::run_pipeline(pts, cfg);
            bool ok = io::emit_artifacts(rep, cfg, run_out);
            std::cout << "procrustes_relative = " << rep.procrustes_relative
                      << ", pearson = " << rep.pearson << "\n";
            if (!ok) {
                std::cerr << "stage invariant failed, see " << run_out << "/diagnostics.json\n";
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
