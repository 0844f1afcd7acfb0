// Command-line front end: exact solves, heuristic baselines, synthetic data
// generation and k sweeps over the clustering library.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mssc/branch_bound.hpp"
#include "mssc/dataset.hpp"
#include "mssc/heuristic.hpp"
#include "mssc/report.hpp"
#include "mssc/rng.hpp"

namespace {

struct CommonFlags {
    int k = 0;
    double gap_tol = -1.0;
    int cp_max_root = 50;
    int cp_max_child = 30;
    double eps_viol = 1e-4;
    double eps_act = 1e-6;
    double eps_cp = -1.0;  // applies to both root and child when set
    double sdp_tol = 1e-5;
    int workers = 1;
    std::uint64_t seed = 0;
    double time_limit = 0.0;  // 0 = none
    int restarts = 20;
    bool verbose = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool require_k) {
    auto* k_opt = cmd->add_option("--k", f.k, "number of clusters");
    if (require_k) k_opt->required();
    cmd->add_option("--gap-tol", f.gap_tol, "relative optimality gap to certify (default: 1e-4, 1e-3 for n >= 1000)");
    cmd->add_option("--cp-max-root", f.cp_max_root, "max cutting-plane rounds at the root");
    cmd->add_option("--cp-max-child", f.cp_max_child, "max cutting-plane rounds per child node");
    cmd->add_option("--eps-viol", f.eps_viol, "minimum violation for a separated cut");
    cmd->add_option("--eps-act", f.eps_act, "activity threshold when purging cuts");
    cmd->add_option("--eps-cp", f.eps_cp, "relative bound improvement below which the loop stops");
    cmd->add_option("--sdp-tol", f.sdp_tol, "relative KKT tolerance of the subproblem solver");
    cmd->add_option("--workers", f.workers, "parallel node workers");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--time-limit", f.time_limit, "wall-clock limit in seconds (0 = none)");
    cmd->add_option("--restarts", f.restarts, "heuristic restarts");
    cmd->add_flag("--verbose", f.verbose, "print one line per search node to stderr");
}

mssc::SolveParams to_params(const CommonFlags& f) {
    mssc::SolveParams p;
    p.k = f.k;
    p.gap_tol = f.gap_tol;
    p.cp_max_root = f.cp_max_root;
    p.cp_max_child = f.cp_max_child;
    p.eps_viol = f.eps_viol;
    p.eps_act = f.eps_act;
    if (f.eps_cp > 0.0) {
        p.eps_cp_root = f.eps_cp;
        p.eps_cp_child = f.eps_cp;
    }
    p.sdp_tol = f.sdp_tol;
    p.workers = f.workers;
    p.seed = f.seed;
    if (f.time_limit > 0.0) p.time_limit = f.time_limit;
    p.restarts = f.restarts;
    if (f.verbose)
        p.on_log = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };
    return p;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5e", v);
    return buf;
}

std::string dataset_name(const std::string& path) { return std::filesystem::path(path).stem().string(); }

int run_solve(const std::string& input, const CommonFlags& flags, const std::string& json_path) {
    if (flags.k < 1) {
        std::cerr << "error: k must be >= 1\n";
        return 1;
    }
    mssc::DataMatrix data = mssc::load_csv(input);
    mssc::SolveReport rep = mssc::solve_exact(data, to_params(flags));
    std::printf("%-14s k=%-3d f_opt=%s cp=%d cuts_cp=%ld gap0=%.2e (gap_cp=%.2e) N=%ld time=%.2fs\n",
                dataset_name(input).c_str(), flags.k, sci(rep.f_opt).c_str(), rep.cp_root, rep.cuts_cp_root,
                rep.gap0, rep.gap_cp, rep.nodes, rep.wall_time);
    if (!json_path.empty()) mssc::write_report(json_path, rep);
    return rep.certified ? 0 : 2;
}

int run_baseline(const std::string& input, const CommonFlags& flags, bool with_sdp) {
    if (flags.k < 1) {
        std::cerr << "error: k must be >= 1\n";
        return 1;
    }
    mssc::DataMatrix data = mssc::load_csv(input);
    const int restarts = std::max(1, flags.restarts);

    mssc::Rng rng_pp(mssc::derive_seed(flags.seed, {10}));
    double ub0 = std::numeric_limits<double>::infinity();
    double ub_pp = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        double obj = mssc::multistart_baseline(data, flags.k, 1, rng_pp, mssc::SeedMode::PlusPlus).objective;
        if (r == 0) ub0 = obj;
        ub_pp = std::min(ub_pp, obj);
    }
    mssc::Rng rng_rand(mssc::derive_seed(flags.seed, {11}));
    double ub_rand = mssc::multistart_baseline(data, flags.k, restarts, rng_rand, mssc::SeedMode::UniformRows).objective;

    std::string ub_cp = "-";
    if (with_sdp) {
        mssc::SolveParams p = to_params(flags);
        p.max_nodes = 1;  // root relaxation only
        mssc::SolveReport rep = mssc::solve_exact(data, p);
        ub_cp = sci(rep.ub_cp);
    }
    std::printf("%-14s k=%-3d UB_0=%s UB_CP=%s UB_++=%s UB_RAND=%s\n", dataset_name(input).c_str(), flags.k,
                sci(ub0).c_str(), ub_cp.c_str(), sci(ub_pp).c_str(), sci(ub_rand).c_str());
    return 0;
}

int run_generate(int n, int k, double sigma, std::uint64_t seed, const std::string& out_dir) {
    mssc::SyntheticSpec spec;
    spec.n = n;
    spec.k = k;
    spec.sigma = sigma;
    spec.seed = seed;
    mssc::DataMatrix data = mssc::generate_gaussian(spec);
    std::filesystem::path path = std::filesystem::path(out_dir) / (mssc::synthetic_name(spec) + ".csv");
    mssc::write_csv(data, path.string());
    std::printf("%s (%d points)\n", path.string().c_str(), data.n());
    return 0;
}

int run_sweep(const std::string& input, int k_min, int k_max, const CommonFlags& flags, bool heuristic_only) {
    if (k_min < 1 || k_max < k_min) {
        std::cerr << "error: need 1 <= k-min <= k-max\n";
        return 1;
    }
    mssc::DataMatrix data = mssc::load_csv(input);
    if (k_max > data.n()) {
        std::cerr << "error: k-max exceeds the number of points\n";
        return 1;
    }

    std::printf("%-4s %-14s %s\n", "k", "objective", heuristic_only ? "(best heuristic)" : "gap");
    int failures = 0;
    double prev_obj = std::numeric_limits<double>::infinity();
    mssc::Assignment prev_best;
    for (int k = k_min; k <= k_max; ++k) {
        try {
            if (heuristic_only) {
                mssc::Rng rng(mssc::derive_seed(flags.seed, {12, static_cast<std::uint64_t>(k)}));
                mssc::HeuristicResult best =
                    mssc::multistart_baseline(data, k, std::max(1, flags.restarts), rng, mssc::SeedMode::PlusPlus);
                // Chained restart: start from the previous solution's centroids
                // plus the point farthest from them, which guarantees the sweep
                // is non-increasing in k.
                if (k > k_min && !prev_best.labels.empty()) {
                    mssc::Matrix centroids(k, data.d());
                    std::vector<int> sizes = mssc::cluster_sizes(prev_best);
                    mssc::Matrix prev_cent = mssc::Matrix::Zero(k - 1, data.d());
                    for (int i = 0; i < data.n(); ++i)
                        prev_cent.row(prev_best.labels[static_cast<std::size_t>(i)] - 1) +=
                            data.points.row(i) / static_cast<double>(sizes[static_cast<std::size_t>(
                                prev_best.labels[static_cast<std::size_t>(i)] - 1)]);
                    centroids.topRows(k - 1) = prev_cent;
                    int far = 0;
                    double far_d = -1.0;
                    for (int i = 0; i < data.n(); ++i) {
                        double d = (data.points.row(i) - prev_cent.row(prev_best.labels[static_cast<std::size_t>(i)] - 1))
                                       .squaredNorm();
                        if (d > far_d) {
                            far_d = d;
                            far = i;
                        }
                    }
                    centroids.row(k - 1) = data.points.row(far);
                    mssc::HeuristicResult chained = mssc::lloyd(data, k, centroids);
                    if (chained.objective < best.objective) best = chained;
                }
                std::printf("%-4d %-14s\n", k, sci(best.objective).c_str());
                prev_obj = best.objective;
                prev_best = best.assignment;
            } else {
                CommonFlags per_k = flags;
                per_k.k = k;
                mssc::SolveReport rep = mssc::solve_exact(data, to_params(per_k));
                std::printf("%-4d %-14s %.2e%s\n", k, sci(rep.f_opt).c_str(), rep.gap,
                            rep.certified ? "" : " (not certified)");
                prev_obj = rep.f_opt;
            }
        } catch (const std::exception& e) {
            std::printf("%-4d error: %s\n", k, e.what());
            ++failures;
        }
    }
    (void)prev_obj;
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and heuristic minimum sum-of-squares clustering"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string input, json_path, out_dir = ".";
    bool with_sdp = false, heuristic_only = false;
    int gen_n = 100, gen_k = 2, k_min = 2, k_max = 2;
    double gen_sigma = 1.0;

    auto* solve = app.add_subcommand("solve", "solve one instance to certified optimality");
    solve->add_option("input", input, "CSV file, one point per row")->required();
    add_common_flags(solve, flags, true);
    solve->add_option("--json", json_path, "also write the report as JSON");

    auto* baseline = app.add_subcommand("baseline", "heuristic upper bounds only");
    baseline->add_option("input", input, "CSV file, one point per row")->required();
    add_common_flags(baseline, flags, true);
    baseline->add_flag("--with-sdp", with_sdp, "also report the bound-guided upper bound from the root relaxation");

    auto* generate = app.add_subcommand("generate", "write a synthetic Gaussian instance");
    generate->add_option("--n", gen_n, "number of points")->required();
    generate->add_option("--k", gen_k, "number of generating centers")->required();
    generate->add_option("--sigma", gen_sigma, "component standard deviation")->required();
    generate->add_option("--seed", flags.seed, "random seed");
    generate->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "objective as a function of k");
    sweep->add_option("input", input, "CSV file, one point per row")->required();
    sweep->add_option("--k-min", k_min, "first k")->required();
    sweep->add_option("--k-max", k_max, "last k")->required();
    add_common_flags(sweep, flags, false);
    sweep->add_flag("--heuristic-only", heuristic_only, "multistart heuristic instead of exact solves");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return run_solve(input, flags, json_path);
        if (baseline->parsed()) return run_baseline(input, flags, with_sdp);
        if (generate->parsed()) return run_generate(gen_n, gen_k, gen_sigma, flags.seed, out_dir);
        if (sweep->parsed()) return run_sweep(input, k_min, k_max, flags, heuristic_only);
    } catch (const mssc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
