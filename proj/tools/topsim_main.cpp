#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "topsim/delaunay.hpp"
#include "topsim/genmetric.hpp"
#include "topsim/hodge.hpp"
#include "topsim/ingest.hpp"
#include "topsim/kernels.hpp"
#include "topsim/pipeline.hpp"
#include "topsim/simplicial_complex.hpp"
#include "topsim/ultra.hpp"

namespace {

using nlohmann::json;
using namespace topsim;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Options shared by the structure-level subcommands.
struct StructureOpts {
    std::string input;
    std::string kind = "alpha";
    double threshold = 0.0;
    int pmax = 3;
    int p = 1;
    int frame = 0;
    std::string jitter;  // "sigma,seed"
    std::string metric = "l1";
};

void add_structure_options(CLI::App* cmd, StructureOpts& o, bool with_p,
                           bool with_metric) {
    cmd->add_option("--input", o.input, ".xyz file or directory of .xyz files")
        ->required();
    cmd->add_option("--kind", o.kind, "complex kind: vr|alpha")
        ->check(CLI::IsMember({"vr", "alpha"}));
    cmd->add_option("--threshold", o.threshold, "filtration threshold (> 0)")
        ->required();
    cmd->add_option("--pmax", o.pmax, "maximum simplex dimension (1-3)");
    if (with_p) cmd->add_option("--p", o.p, "cohomology degree (0-3)");
    cmd->add_option("--frame", o.frame,
                    "frame index among all loaded frames (default 0)");
    cmd->add_option("--jitter", o.jitter,
                    "perturb coordinates: sigma,seed (e.g. 0.05,7)");
    if (with_metric)
        cmd->add_option("--metric", o.metric,
                        "generator metric: l1|cocycle|wasserstein")
            ->check(CLI::IsMember({"l1", "cocycle", "wasserstein"}));
}

std::pair<double, std::uint64_t> parse_jitter(const std::string& spec) {
    auto comma = spec.find(',');
    if (comma == std::string::npos)
        throw ConfigError("--jitter expects sigma,seed");
    try {
        std::size_t used = 0;
        double sigma = std::stod(spec.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("trailing");
        std::string seed_part = spec.substr(comma + 1);
        std::uint64_t seed = std::stoull(seed_part, &used);
        if (used != seed_part.size()) throw std::invalid_argument("trailing");
        if (!(sigma > 0)) throw ConfigError("--jitter sigma must be > 0");
        return {sigma, seed};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("--jitter expects sigma,seed (got '" + spec + "')");
    }
}

PointCloud select_cloud(const StructureOpts& o) {
    auto sets = load_inputs({o.input});
    std::vector<PointCloud> frames;
    for (const auto& s : sets)
        for (const auto& f : s.frames) frames.push_back(f);
    if (frames.empty()) throw DataError("no frames found in " + o.input);
    if (o.frame < 0 || o.frame >= static_cast<int>(frames.size()))
        throw ConfigError("--frame out of range (loaded " +
                          std::to_string(frames.size()) + " frames)");
    PointCloud cloud = frames[o.frame];
    if (!o.jitter.empty()) {
        auto [sigma, seed] = parse_jitter(o.jitter);
        cloud = jitter_cloud(cloud, sigma, seed);
    }
    return cloud;
}

SimplicialComplex build_complex(const PointCloud& cloud,
                                const StructureOpts& o) {
    ComplexKind kind = complex_kind_from_string(o.kind);
    if (!(o.threshold > 0))
        throw ConfigError("--threshold must be positive");
    return kind == ComplexKind::VR ? build_vr(cloud, o.threshold, o.pmax)
                                   : build_alpha(cloud, o.threshold, o.pmax);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << text;
}

void emit_text(const std::string& output, const std::string& text) {
    if (output.empty())
        std::cout << text;
    else
        write_text(output, text);
}

std::string matrix_csv(const Eigen::MatrixXd& M) {
    std::string out;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out += ",";
            out += fmt17(M(i, j));
        }
        out += "\n";
    }
    return out;
}

json complex_to_json(const SimplicialComplex& K) {
    json dims = json::object();
    json filtration = json::array();
    for (int d = 0; d <= K.p_max; ++d) {
        json list = json::array();
        for (const auto& s : K.simplices(d)) {
            list.push_back(s.vertices);
            filtration.push_back(s.filtration);
        }
        dims[std::to_string(d)] = std::move(list);
    }
    return json{{"kind", to_string(K.kind)},
                {"threshold", K.threshold},
                {"dims", std::move(dims)},
                {"filtration", std::move(filtration)}};
}

double parse_tol(const std::string& tol) {
    if (tol == "auto") return 0.0;
    try {
        std::size_t used = 0;
        double v = std::stod(tol, &used);
        if (used != tol.size() || !(v > 0))
            throw std::invalid_argument("bad");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("--tol expects 'auto' or a positive number");
    }
}

StageParams stage_params(const StructureOpts& o) {
    StageParams sp;
    sp.kind = complex_kind_from_string(o.kind);
    sp.threshold = o.threshold;
    sp.p = o.p;
    sp.metric = metric_kind_from_string(o.metric);
    sp.kmax_dim = std::max(0, o.pmax - 1);
    return sp;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "topsim: structural similarity of molecular point clouds via "
        "harmonic cohomology and ultrametric Gromov-Hausdorff distances"};
    app.require_subcommand(1);

    StructureOpts opts;
    std::string output;

    // ---- complex build ----------------------------------------------------
    auto* complex = app.add_subcommand("complex", "simplicial complexes");
    complex->require_subcommand(1);
    auto* cbuild = complex->add_subcommand(
        "build", "build a VR or alpha complex and export it as JSON");
    add_structure_options(cbuild, opts, false, false);
    cbuild->add_option("--output", output, "write JSON here (default stdout)");
    cbuild->callback([&]() {
        auto K = build_complex(select_cloud(opts), opts);
        emit_text(output, complex_to_json(K).dump(2) + "\n");
    });

    // ---- hodge ------------------------------------------------------------
    auto* hodge = app.add_subcommand("hodge", "Hodge Laplacian analysis");
    hodge->require_subcommand(1);

    std::string tol = "auto";
    auto* hgen = hodge->add_subcommand(
        "generators", "harmonic generators of degree p as JSON");
    add_structure_options(hgen, opts, true, false);
    hgen->add_option("--tol", tol, "kernel tolerance: auto or a number");
    hgen->add_option("--output", output, "write JSON here (default stdout)");
    hgen->callback([&]() {
        auto K = build_complex(select_cloud(opts), opts);
        GeneratorSet G = harmonic_generators(K, opts.p, parse_tol(tol));
        json vecs = json::array();
        for (const auto& v : G.vectors)
            vecs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        json out{{"p", G.p},
                 {"betti", G.vectors.size()},
                 {"tolerance", G.tolerance},
                 {"gap_warning", G.gap_warning},
                 {"kernel_eigenvalues", G.kernel_eigenvalues},
                 {"simplex_order", G.simplex_order},
                 {"vectors", std::move(vecs)}};
        emit_text(output, out.dump(2) + "\n");
    });

    auto* hspec = hodge->add_subcommand(
        "spectrum", "eigenvalues of the degree-p Hodge Laplacian");
    add_structure_options(hspec, opts, true, false);
    hspec->add_option("--output", output,
                      "write eigenvalues here (default stdout)");
    hspec->callback([&]() {
        auto K = build_complex(select_cloud(opts), opts);
        Spectrum S = spectrum(hodge_laplacian(K, opts.p));
        std::string text;
        for (Eigen::Index i = 0; i < S.eigenvalues.size(); ++i)
            text += fmt17(S.eigenvalues(i)) + "\n";
        emit_text(output, text);
    });

    // ---- distmat ----------------------------------------------------------
    auto* dmat = app.add_subcommand(
        "distmat", "pairwise distances between harmonic generators (CSV)");
    add_structure_options(dmat, opts, true, true);
    dmat->add_option("--output", output, "write CSV here (default stdout)");
    dmat->callback([&]() {
        auto K = build_complex(select_cloud(opts), opts);
        GeneratorSet G = harmonic_generators(K, opts.p);
        if (G.vectors.empty())
            warn("no degree-" + std::to_string(opts.p) +
                 " generators at this threshold; empty matrix");
        MetricSpace M =
            generator_metric_space(G, metric_kind_from_string(opts.metric), K);
        emit_text(output, matrix_csv(M.dmatrix));
    });

    // ---- ultra ------------------------------------------------------------
    auto* ultra = app.add_subcommand("ultra", "ultrametric layer");
    ultra->require_subcommand(1);

    std::string newick_path, csv_path;
    auto* utrans = ultra->add_subcommand(
        "transform",
        "subdominant ultrametric of the generator metric space; prints the "
        "dendrogram in Newick format");
    add_structure_options(utrans, opts, true, true);
    utrans->add_option("--newick", newick_path,
                       "also write the Newick tree to this file");
    utrans->add_option("--csv", csv_path,
                       "also write the ultrametric matrix as CSV");
    utrans->callback([&]() {
        Ultrametric U = structure_ultrametric(select_cloud(opts),
                                              stage_params(opts));
        if (U.empty())
            throw DataError(
                "no degree-" + std::to_string(opts.p) +
                " generators at this threshold; nothing to transform");
        std::string tree = to_newick(dendrogram(U)) + "\n";
        std::cout << tree;
        if (!newick_path.empty()) write_text(newick_path, tree);
        if (!csv_path.empty()) write_text(csv_path, matrix_csv(U.d));
    });

    std::string input_a, input_b;
    auto* uugh = ultra->add_subcommand(
        "ugh",
        "Gromov-Hausdorff ultrametric between the generator ultrametrics of "
        "two structures (first frame of each input)");
    uugh->add_option("--a", input_a, "first .xyz input")->required();
    uugh->add_option("--b", input_b, "second .xyz input")->required();
    uugh->add_option("--kind", opts.kind, "complex kind: vr|alpha")
        ->check(CLI::IsMember({"vr", "alpha"}));
    uugh->add_option("--threshold", opts.threshold, "filtration threshold")
        ->required();
    uugh->add_option("--pmax", opts.pmax, "maximum simplex dimension (1-3)");
    uugh->add_option("--p", opts.p, "cohomology degree (0-3)");
    uugh->add_option("--metric", opts.metric,
                     "generator metric: l1|cocycle|wasserstein")
        ->check(CLI::IsMember({"l1", "cocycle", "wasserstein"}));
    uugh->add_option("--jitter", opts.jitter, "sigma,seed applied to both");
    uugh->callback([&]() {
        auto load_first = [&](const std::string& path, int seed_offset) {
            StructureOpts one = opts;
            one.input = path;
            one.frame = 0;
            if (!one.jitter.empty()) {
                auto [sigma, seed] = parse_jitter(one.jitter);
                one.jitter = "";
                PointCloud c = select_cloud(one);
                return jitter_cloud(c, sigma, seed + seed_offset);
            }
            return select_cloud(one);
        };
        Ultrametric A =
            structure_ultrametric(load_first(input_a, 0), stage_params(opts));
        Ultrametric B =
            structure_ultrametric(load_first(input_b, 1), stage_params(opts));
        std::cout << fmt17(ugh(A, B)) << "\n";
    });

    // ---- pipeline ---------------------------------------------------------
    auto* pipe = app.add_subcommand("pipeline", "end-to-end clustering runs");
    pipe->require_subcommand(1);
    std::string config_path, out_dir = "out";
    auto* prun = pipe->add_subcommand("run", "run a configured pipeline");
    prun->add_option("--config", config_path, "run configuration JSON")
        ->required();
    prun->add_option("--out", out_dir, "output directory (default ./out)");
    prun->callback([&]() {
        RunConfig config = load_run_config(config_path);
        PipelineResult R = run_pipeline(config, out_dir);
        std::cout << "structures: " << R.structure_tags.size() << "\n";
        for (const auto& stage : R.stages)
            std::cout << "threshold " << stage.threshold << ": " << stage.n_empty
                      << " empty generator spaces\n";
        std::cout << "kmeans inertia: " << fmt17(R.clustering.inertia) << "\n";
        std::cout << "ARI vs file-of-origin labels: " << fmt17(R.ari_value)
                  << "\n";
        std::cout << "outputs written to " << out_dir << "\n";
    });

    // ---- gen-lattice ------------------------------------------------------
    auto* genlat = app.add_subcommand(
        "gen-lattice",
        "generate jittered cubic-lattice .xyz test sets (one file per lattice "
        "constant, one frame per replicate)");
    std::string lat_out = "lattices";
    int lat_n = 3, lat_reps = 5;
    double lat_sigma = 0.1;
    std::uint64_t lat_seed = 1;
    std::vector<double> lat_spacings{2.8, 3.0, 3.2};
    genlat->add_option("--out", lat_out, "output directory");
    genlat->add_option("--n", lat_n, "lattice points per axis (default 3)");
    genlat->add_option("--spacings", lat_spacings,
                       "lattice constants, one class each");
    genlat->add_option("--per-class", lat_reps, "replicates per class");
    genlat->add_option("--sigma", lat_sigma, "jitter standard deviation");
    genlat->add_option("--seed", lat_seed, "base RNG seed");
    genlat->callback([&]() {
        if (lat_n < 2) throw ConfigError("--n must be at least 2");
        if (lat_reps < 1) throw ConfigError("--per-class must be at least 1");
        std::filesystem::create_directories(lat_out);
        std::uint64_t seed = lat_seed;
        for (double a : lat_spacings) {
            if (!(a > 0)) throw ConfigError("spacings must be positive");
            PointCloud base;
            for (int i = 0; i < lat_n; ++i)
                for (int j = 0; j < lat_n; ++j)
                    for (int k = 0; k < lat_n; ++k)
                        base.points.emplace_back(i * a, j * a, k * a);
            TrajectorySet traj;
            char name[64];
            std::snprintf(name, sizeof name, "lattice_a%g", a);
            traj.group_label = name;
            for (int r = 0; r < lat_reps; ++r) {
                PointCloud frame = jitter_cloud(base, lat_sigma, seed++);
                frame.frame_id = r;
                frame.source_tag = name;
                traj.frames.push_back(std::move(frame));
            }
            std::string path =
                (std::filesystem::path(lat_out) / (std::string(name) + ".xyz"))
                    .string();
            write_text(path, write_xyz(traj));
            std::cout << path << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const topsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
