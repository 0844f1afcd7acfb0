#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <utility>
#include <vector>

#include "mssc/common.hpp"
#include "mssc/cuts.hpp"
#include "mssc/dataset.hpp"
#include "mssc/heuristic.hpp"
#include "mssc/rng.hpp"
#include "mssc/safe_bound.hpp"
#include "mssc/sdp.hpp"

#ifdef MSSC_USE_LAPACKE
extern "C" void openblas_set_num_threads(int);
#endif

namespace mssc {

/// Snapshot of one finished node, for callers auditing the search.
struct NodeAudit {
    long node_id = 0;
    int depth = 0;
    std::vector<std::vector<int>> groups;
    std::vector<std::pair<int, int>> cl_global;
    double lb_mssc = -std::numeric_limits<double>::infinity();
    double lb_inherited = -std::numeric_limits<double>::infinity();
    bool pruned_before_solve = false;
    bool integral = false;
};

/// All knobs of the exact solver. Tolerances are relative unless noted.
struct SolveParams {
    int k = 2;
    double gap_tol = -1.0;  // <= 0 selects 1e-4 (n < 1000) or 1e-3 (n >= 1000)
    int cp_max_root = 50;
    int cp_max_child = 30;
    double eps_viol = 1e-4;
    double eps_act = 1e-6;
    double eps_cp_root = 1e-4;
    double eps_cp_child = 1e-3;
    double sdp_tol = 1e-5;
    int workers = 1;
    std::uint64_t seed = 0;
    double time_limit = std::numeric_limits<double>::infinity();  // seconds
    int restarts = 20;
    int separation_budget = 100000;
    double keep_fraction = 0.05;
    int admm_max_iter = 20000;
    long max_nodes = std::numeric_limits<long>::max();  // 1 = root relaxation only

    /// Called once per closed node (after its bound is final).
    std::function<void(const NodeAudit&)> on_node;
    /// Called for every clustering any heuristic produces, before it competes
    /// for the incumbent.
    std::function<void(const Assignment&, double, long)> on_heuristic;
    /// Called with one formatted line per processed node: id, depth, group
    /// count, bounds, cutting-plane rounds, cut churn, branching pair and the
    /// node's fate.
    std::function<void(const std::string&)> on_log;
};

/// Outcome of an exact solve. The first ten fields are the report contract;
/// the rest are diagnostics.
struct SolveReport {
    double f_opt = std::numeric_limits<double>::infinity();
    std::vector<int> labels;
    double lb = -std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    long nodes = 0;
    int cp_root = 0;
    long cuts_cp_root = 0;
    double gap0 = std::numeric_limits<double>::quiet_NaN();
    double gap_cp = std::numeric_limits<double>::quiet_NaN();
    double wall_time = 0.0;

    double ub_cp = std::numeric_limits<double>::infinity();  // best bound-guided upper bound at the root
    bool certified = false;
    bool timed_out = false;
};

/// Renumbers cluster labels to 1..k in order of first appearance, so two
/// clusterings that induce the same partition compare equal.
inline std::vector<int> canonical_labels(const std::vector<int>& labels) {
    std::map<int, int> remap;
    std::vector<int> out;
    out.reserve(labels.size());
    int next = 1;
    for (int l : labels) {
        auto [it, inserted] = remap.insert({l, next});
        if (inserted) ++next;
        out.push_back(it->second);
    }
    return out;
}

/// Merges group j into group i (i < j) for a must-link branch; member lists
/// stay sorted. Throws InfeasibleMerge if a cannot-link pair straddles the
/// two groups.
inline std::vector<std::vector<int>> shrink_merge(const std::vector<std::vector<int>>& groups, int i, int j,
                                                  const std::vector<std::pair<int, int>>& cl_global) {
    if (i < 0 || j < 0 || i >= static_cast<int>(groups.size()) || j >= static_cast<int>(groups.size()) || i >= j)
        throw IndexOutOfRange("shrink_merge expects valid i < j");
    std::set<int> members_i(groups[static_cast<std::size_t>(i)].begin(), groups[static_cast<std::size_t>(i)].end());
    std::set<int> members_j(groups[static_cast<std::size_t>(j)].begin(), groups[static_cast<std::size_t>(j)].end());
    for (auto [a, b] : cl_global) {
        bool ai = members_i.count(a) > 0, aj = members_j.count(a) > 0;
        bool bi = members_i.count(b) > 0, bj = members_j.count(b) > 0;
        if ((ai && bj) || (aj && bi)) throw InfeasibleMerge("cannot-link pair forbids merging the groups");
    }
    std::vector<std::vector<int>> out;
    out.reserve(groups.size() - 1);
    for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
        if (g == j) continue;
        out.push_back(groups[static_cast<std::size_t>(g)]);
        if (g == i) {
            auto& merged = out.back();
            merged.insert(merged.end(), groups[static_cast<std::size_t>(j)].begin(),
                          groups[static_cast<std::size_t>(j)].end());
            std::sort(merged.begin(), merged.end());
        }
    }
    return out;
}

/// Aggregated Gram matrix after merging shrunk indices i < j: the two rows
/// and columns add.
inline Matrix fold_gram(const Matrix& w, int i, int j) {
    int m = static_cast<int>(w.rows());
    if (i < 0 || j <= i || j >= m) throw IndexOutOfRange("fold_gram expects 0 <= i < j < m");
    auto src = [&](int t) { return t < j ? t : t + 1; };
    Matrix out(m - 1, m - 1);
    for (int r = 0; r < m - 1; ++r)
        for (int c = 0; c < m - 1; ++c) out(r, c) = w(src(r), src(c));
    for (int c = 0; c < m - 1; ++c) {
        if (c == i) continue;
        out(i, c) += w(j, src(c));
        out(c, i) += w(src(c), j);
    }
    out(i, i) = w(i, i) + 2.0 * w(i, j) + w(j, j);
    return out;
}

/// Most fractional index pair: argmax over unconstrained pairs of
/// min(Z_ij, ||Z_i - Z_j||^2), ties to the lexicographically smallest pair.
/// Returns nothing when the maximum is below 1e-5, which certifies the
/// relaxation solution is (numerically) a clustering matrix.
inline std::optional<std::pair<int, int>> select_branching_pair(const Matrix& z,
                                                               const std::set<std::pair<int, int>>& cl_local) {
    const int m = static_cast<int>(z.rows());
    Matrix g = z * z;
    double best = -1.0;
    std::pair<int, int> pick{-1, -1};
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            if (cl_local.count({i, j}) > 0) continue;
            double row_gap = g(i, i) + g(j, j) - 2.0 * g(i, j);
            double score = std::min(z(i, j), row_gap);
            if (score > best) {
                best = score;
                pick = {i, j};
            }
        }
    if (best < 1e-5) return std::nullopt;
    return pick;
}

namespace detail {

/// Connected components of the graph with edges z(i,j) > tau.
inline std::vector<int> threshold_components(const Matrix& z, double tau, int& count) {
    const int m = static_cast<int>(z.rows());
    std::vector<int> comp(static_cast<std::size_t>(m), -1);
    count = 0;
    for (int s = 0; s < m; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> stack{s};
        comp[static_cast<std::size_t>(s)] = count;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int t = 0; t < m; ++t)
                if (comp[static_cast<std::size_t>(t)] < 0 && z(v, t) > tau) {
                    comp[static_cast<std::size_t>(t)] = count;
                    stack.push_back(t);
                }
        }
        ++count;
    }
    return comp;
}

struct BBNode {
    long id = 0;
    long seq = 0;
    int depth = 0;
    double lb = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> groups;
    std::vector<std::pair<int, int>> cl_global;
    CutPool pool;
    Matrix w_shrunk;
    SdpWarmStart warm;
};

using NodePtr = std::shared_ptr<BBNode>;

struct NodeOrder {
    bool operator()(const NodePtr& a, const NodePtr& b) const {
        if (a->lb != b->lb) return a->lb < b->lb;
        if (a->depth != b->depth) return a->depth > b->depth;
        return a->seq < b->seq;
    }
};

/// Weighted fold of a symmetric warm-start matrix under the merge (i,j)->i
/// with group weights wi, wj.
inline Matrix fold_warm_matrix(const Matrix& x, int i, int j, double wi, double wj) {
    const Eigen::Index m = x.rows();
    double a = wi / (wi + wj), b = wj / (wi + wj);
    auto src = [&](Eigen::Index t) { return t < j ? t : t + 1; };
    Matrix out(m - 1, m - 1);
    for (Eigen::Index r = 0; r < m - 1; ++r)
        for (Eigen::Index c = 0; c < m - 1; ++c) out(r, c) = x(src(r), src(c));
    for (Eigen::Index c = 0; c < m - 1; ++c) {
        if (c == i) continue;
        out(i, c) = a * x(i, src(c)) + b * x(j, src(c));
        out(c, i) = out(i, c);
    }
    out(i, i) = a * a * x(i, i) + 2.0 * a * b * x(i, j) + b * b * x(j, j);
    return out;
}

inline SdpWarmStart fold_warm(const SdpWarmStart& w, int i, int j, double wi, double wj) {
    SdpWarmStart out;
    if (!w.valid) return out;
    out.valid = true;
    out.sigma = w.sigma;
    out.x = fold_warm_matrix(w.x, i, j, wi, wj);
    out.s_psd = fold_warm_matrix(w.s_psd, i, j, wi, wj);
    out.p_pos = fold_warm_matrix(w.p_pos, i, j, wi, wj);
    int m = static_cast<int>(w.y_rows.size());
    auto src = [&](int t) { return t < j ? t : t + 1; };
    out.y_rows = Vector(m - 1);
    for (int t = 0; t < m - 1; ++t) out.y_rows(t) = w.y_rows(src(t));
    out.y_rows(i) = 0.5 * (w.y_rows(i) + w.y_rows(j));
    out.y_trace = w.y_trace;
    for (const auto& [key, val] : w.u_cl) {
        int a = remap_index(key.first, i, j), b = remap_index(key.second, i, j);
        if (a == b) continue;
        auto nk = std::make_pair(std::min(a, b), std::max(a, b));
        auto [it, inserted] = out.u_cl.insert({nk, val});
        if (!inserted) it->second = 0.5 * (it->second + val);
    }
    out.cut_xi = w.cut_xi;
    out.cut_s = w.cut_s;
    return out;
}

/// Shared search state; everything mutable is guarded by mu.
struct SearchState {
    std::mutex mu;
    std::condition_variable cv;
    std::multiset<NodePtr, NodeOrder> queue;
    std::multiset<double> inflight;
    int active = 0;
    bool stop = false;
    bool timed_out = false;
    std::exception_ptr error;

    double ub = std::numeric_limits<double>::infinity();
    Assignment incumbent;
    long nodes_created = 0;
    long seq_counter = 0;
    std::uint64_t next_cut_id = 1;
    double frontier_lb = std::numeric_limits<double>::infinity();  // bounds of gap-closed / unexpanded nodes
    double lb_at_stop = std::numeric_limits<double>::quiet_NaN();

    // Root statistics.
    double ub0 = std::numeric_limits<double>::infinity();
    double ub_cp = std::numeric_limits<double>::infinity();
    double gap0 = std::numeric_limits<double>::quiet_NaN();
    double gap_cp = std::numeric_limits<double>::quiet_NaN();
    int cp_root = 0;
    long cuts_cp_root = 0;

    std::chrono::steady_clock::time_point t0;
};

}  // namespace detail

/// Exact minimum sum-of-squares clustering by shrinking branch-and-bound over
/// the strengthened semidefinite relaxation. Every popped node runs the
/// cutting-plane loop (solve the relaxation, certify a rigorous lower bound,
/// round a feasible clustering, separate violated inequalities), prunes
/// against the incumbent, and otherwise branches on the most fractional index
/// pair into a merge child and a cannot-link child. The data is mean-centered
/// internally (the objective is translation invariant and the Gram matrix far
/// better conditioned); the reported objective is recomputed on the original
/// coordinates.
class ExactSolver {
public:
    ExactSolver(const DataMatrix& data, SolveParams params) : raw_(data), params_(std::move(params)) {
        if (raw_.n() == 0) throw EmptyInput("no data points");
        if (params_.k < 1 || params_.k > raw_.n())
            throw InvalidK("k=" + std::to_string(params_.k) + " with n=" + std::to_string(raw_.n()));
        centered_ = raw_;
        Eigen::RowVectorXd mean = centered_.points.colwise().mean();
        centered_.points.rowwise() -= mean;
        gram_c_ = gram(centered_);
        if (params_.gap_tol <= 0.0) params_.gap_tol = raw_.n() < 1000 ? 1e-4 : 1e-3;
    }

    SolveReport run() {
#ifdef MSSC_USE_LAPACKE
        // With several search workers the BLAS must not oversubscribe cores;
        // a single worker keeps the library's own parallelism for the large
        // dense eigendecompositions.
        if (std::max(1, params_.workers) > 1) openblas_set_num_threads(1);
#endif
        state_.t0 = std::chrono::steady_clock::now();

        auto root = std::make_shared<detail::BBNode>();
        root->id = 0;
        root->seq = state_.seq_counter++;
        root->groups.resize(static_cast<std::size_t>(raw_.n()));
        for (int i = 0; i < raw_.n(); ++i) root->groups[static_cast<std::size_t>(i)] = {i};
        root->w_shrunk = gram_c_.w;
        root->pool.eps_viol = params_.eps_viol;
        root->pool.eps_act = params_.eps_act;
        state_.nodes_created = 1;
        state_.queue.insert(root);

        int workers = std::max(1, params_.workers);
        if (workers == 1) {
            worker_loop();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int t = 0; t < workers; ++t) pool.emplace_back([this] { worker_loop(); });
            for (auto& th : pool) th.join();
        }
        if (state_.error) std::rethrow_exception(state_.error);

        SolveReport rep;
        rep.nodes = state_.nodes_created;
        rep.cp_root = state_.cp_root;
        rep.cuts_cp_root = state_.cuts_cp_root;
        rep.gap0 = state_.gap0;
        rep.gap_cp = state_.gap_cp;
        rep.ub_cp = state_.ub_cp;
        rep.timed_out = state_.timed_out;
        double lb;
        if (!std::isnan(state_.lb_at_stop))
            lb = state_.lb_at_stop;
        else
            lb = std::min(state_.frontier_lb, state_.ub);
        if (!state_.incumbent.labels.empty()) {
            rep.labels = state_.incumbent.labels;
            rep.f_opt = mssc_objective(raw_, state_.incumbent);
            // The incumbent was certified on centered coordinates; the raw
            // recompute can differ by an ulp, so keep lb <= f_opt.
            lb = std::min(lb, rep.f_opt);
        }
        rep.lb = lb;
        double ub = state_.ub;
        if (std::isfinite(ub)) {
            rep.gap = ub != 0.0 ? std::max(0.0, (ub - lb) / std::abs(ub)) : std::max(0.0, -lb);
            rep.certified = rep.gap <= params_.gap_tol * (1.0 + 1e-12);
        }
        rep.wall_time = elapsed();
        return rep;
    }

private:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - state_.t0).count();
    }

    bool out_of_time() const { return elapsed() > params_.time_limit; }

    double global_lb_locked() const {
        double lb = std::numeric_limits<double>::infinity();
        if (!state_.queue.empty()) lb = std::min(lb, (*state_.queue.begin())->lb);
        if (!state_.inflight.empty()) lb = std::min(lb, *state_.inflight.begin());
        lb = std::min(lb, state_.frontier_lb);
        return lb;
    }

    void worker_loop() {
        std::unique_lock lk(state_.mu);
        for (;;) {
            state_.cv.wait(lk, [&] { return state_.stop || !state_.queue.empty() || state_.active == 0; });
            if (state_.stop) break;
            if (state_.queue.empty()) {
                if (state_.active == 0) break;
                continue;
            }
            double lbg = global_lb_locked();
            double ub = state_.ub;
            if (std::isfinite(ub) && (ub - lbg) <= params_.gap_tol * std::abs(ub)) {
                state_.lb_at_stop = lbg;
                state_.stop = true;
                state_.cv.notify_all();
                break;
            }
            if (out_of_time()) {
                state_.lb_at_stop = lbg;
                state_.stop = true;
                state_.timed_out = true;
                state_.cv.notify_all();
                break;
            }
            detail::NodePtr node = *state_.queue.begin();
            state_.queue.erase(state_.queue.begin());
            double popped_lb = node->lb;
            state_.inflight.insert(popped_lb);
            ++state_.active;
            lk.unlock();

            try {
                process(node);
            } catch (...) {
                lk.lock();
                state_.error = std::current_exception();
                state_.stop = true;
                --state_.active;
                state_.inflight.erase(state_.inflight.find(popped_lb));
                state_.cv.notify_all();
                break;
            }

            lk.lock();
            --state_.active;
            state_.inflight.erase(state_.inflight.find(popped_lb));
            state_.cv.notify_all();
        }
        state_.cv.notify_all();
    }

    /// Lifts global cannot-link pairs onto the node's shrunk indices.
    static std::set<std::pair<int, int>> lift_cl_local(const detail::BBNode& node, int n) {
        std::vector<int> group_of(static_cast<std::size_t>(n), -1);
        for (std::size_t g = 0; g < node.groups.size(); ++g)
            for (int p : node.groups[g]) group_of[static_cast<std::size_t>(p)] = static_cast<int>(g);
        std::set<std::pair<int, int>> out;
        for (auto [a, b] : node.cl_global) {
            int ga = group_of[static_cast<std::size_t>(a)], gb = group_of[static_cast<std::size_t>(b)];
            if (ga != gb) out.insert({std::min(ga, gb), std::max(ga, gb)});
        }
        return out;
    }

    void fire_log(const detail::NodePtr& node, int m, int cp_iters, long cuts_added, long cuts_purged,
                  std::pair<int, int> pick, const char* decision) {
        if (!params_.on_log) return;
        char pair_buf[32];
        if (pick.first >= 0)
            std::snprintf(pair_buf, sizeof pair_buf, "(%d,%d)", pick.first, pick.second);
        else
            std::snprintf(pair_buf, sizeof pair_buf, "-");
        char buf[224];
        std::snprintf(buf, sizeof buf,
                      "node=%ld depth=%d m=%d lb=%.9e ub=%.9e cp=%d cuts+=%ld cuts-=%ld branch=%s decision=%s",
                      node->id, node->depth, m, node->lb, ub_snapshot(), cp_iters, cuts_added, cuts_purged,
                      pair_buf, decision);
        params_.on_log(buf);
    }

    void fire_audit(const detail::NodePtr& node, double lb_inherited, bool pruned, bool integral) {
        if (!params_.on_node) return;
        NodeAudit a;
        a.node_id = node->id;
        a.depth = node->depth;
        a.groups = node->groups;
        a.cl_global = node->cl_global;
        a.lb_mssc = node->lb;
        a.lb_inherited = lb_inherited;
        a.pruned_before_solve = pruned;
        a.integral = integral;
        params_.on_node(a);
    }

    void offer_incumbent(const HeuristicResult& res, long node_id) {
        if (params_.on_heuristic) params_.on_heuristic(res.assignment, res.objective, node_id);
        std::lock_guard lk(state_.mu);
        if (res.objective < state_.ub) {
            state_.ub = res.objective;
            state_.incumbent = res.assignment;
        }
    }

    double ub_snapshot() {
        std::lock_guard lk(state_.mu);
        return state_.ub;
    }

    /// Clustering read directly off an (integrally converged) relaxation
    /// solution via connected components; objective on centered data.
    std::optional<HeuristicResult> round_components(const Matrix& z, const std::vector<std::vector<int>>& groups,
                                                    const std::set<std::pair<int, int>>& cl_local) {
        int comps = 0;
        std::vector<int> comp = detail::threshold_components(z, 1e-4, comps);
        if (comps != params_.k) return std::nullopt;
        for (auto [a, b] : cl_local)
            if (comp[static_cast<std::size_t>(a)] == comp[static_cast<std::size_t>(b)]) return std::nullopt;
        HeuristicResult res;
        res.assignment.k = params_.k;
        res.assignment.labels.assign(static_cast<std::size_t>(raw_.n()), 0);
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (int p : groups[g]) res.assignment.labels[static_cast<std::size_t>(p)] = comp[g] + 1;
        res.objective = mssc_objective(centered_, res.assignment);
        return res;
    }

    /// Records a node whose subtree is closed with its bound still below the
    /// incumbent (within the gap tolerance, or because expansion is barred);
    /// the final reported lower bound takes these into account.
    void close_to_frontier(double lb) {
        std::lock_guard lk(state_.mu);
        state_.frontier_lb = std::min(state_.frontier_lb, lb);
    }

    /// Exact closure of a small node by enumerating all k-partitions of its
    /// groups that respect the cannot-link pairs. Returns the optimum (offered
    /// as incumbent) or nothing when the node is infeasible.
    std::optional<double> enumerate_exact(const detail::NodePtr& node,
                                          const std::set<std::pair<int, int>>& cl_set) {
        const int m = static_cast<int>(node->groups.size());
        std::vector<std::vector<int>> foes(static_cast<std::size_t>(m));
        for (auto [a, b] : cl_set) {
            foes[static_cast<std::size_t>(b)].push_back(a);
            foes[static_cast<std::size_t>(a)].push_back(b);
        }
        std::vector<int> glabels(static_cast<std::size_t>(m), 0);
        std::optional<HeuristicResult> best;
        std::function<void(int, int)> rec = [&](int pos, int used) {
            if (used + (m - pos) < params_.k) return;
            if (pos == m) {
                if (used != params_.k) return;
                HeuristicResult cand;
                cand.assignment.k = params_.k;
                cand.assignment.labels.assign(static_cast<std::size_t>(raw_.n()), 0);
                for (std::size_t g = 0; g < node->groups.size(); ++g)
                    for (int p : node->groups[g])
                        cand.assignment.labels[static_cast<std::size_t>(p)] = glabels[g];
                cand.objective = mssc_objective(centered_, cand.assignment);
                if (!best || cand.objective < best->objective) best = cand;
                return;
            }
            int cap = std::min(used + 1, params_.k);
            for (int b = 1; b <= cap; ++b) {
                bool ok = true;
                for (int f : foes[static_cast<std::size_t>(pos)])
                    if (f < pos && glabels[static_cast<std::size_t>(f)] == b) ok = false;
                if (!ok) continue;
                glabels[static_cast<std::size_t>(pos)] = b;
                rec(pos + 1, std::max(used, b));
            }
        };
        rec(0, 0);
        if (!best) return std::nullopt;
        offer_incumbent(*best, node->id);
        return best->objective;
    }

    void branch(const detail::NodePtr& node, std::pair<int, int> pick) {
        auto [i, j] = pick;
        const int m = static_cast<int>(node->groups.size());
        double wi = static_cast<double>(node->groups[static_cast<std::size_t>(i)].size());
        double wj = static_cast<double>(node->groups[static_cast<std::size_t>(j)].size());

        std::vector<detail::NodePtr> children;
        if (m - 1 >= params_.k) {  // merge child infeasible below k groups
            auto must = std::make_shared<detail::BBNode>();
            must->depth = node->depth + 1;
            must->lb = node->lb;
            must->groups = shrink_merge(node->groups, i, j, node->cl_global);
            must->cl_global = node->cl_global;
            must->pool = inherit_remap(node->pool, i, j);
            must->w_shrunk = fold_gram(node->w_shrunk, i, j);
            must->warm = detail::fold_warm(node->warm, i, j, wi, wj);
            children.push_back(std::move(must));
        }
        {
            auto cannot = std::make_shared<detail::BBNode>();
            cannot->depth = node->depth + 1;
            cannot->lb = node->lb;
            cannot->groups = node->groups;
            cannot->cl_global = node->cl_global;
            for (int a : node->groups[static_cast<std::size_t>(i)])
                for (int b : node->groups[static_cast<std::size_t>(j)])
                    cannot->cl_global.push_back({std::min(a, b), std::max(a, b)});
            cannot->pool = node->pool;
            cannot->w_shrunk = node->w_shrunk;
            cannot->warm = node->warm;
            children.push_back(std::move(cannot));
        }

        std::lock_guard lk(state_.mu);
        if (state_.stop || state_.nodes_created + static_cast<long>(children.size()) > params_.max_nodes) {
            state_.frontier_lb = std::min(state_.frontier_lb, node->lb);
            return;
        }
        for (auto& child : children) {
            child->id = state_.nodes_created++;
            child->seq = state_.seq_counter++;
            state_.queue.insert(std::move(child));
        }
        state_.cv.notify_all();
    }

    void process(const detail::NodePtr& node) {
        const bool is_root = node->id == 0;
        const double lb_inherited = node->lb;

        if (node->lb >= ub_snapshot()) {
            fire_log(node, static_cast<int>(node->groups.size()), 0, 0, 0, {-1, -1}, "prune-inherited");
            fire_audit(node, lb_inherited, true, false);
            return;
        }

        Rng rng(derive_seed(params_.seed, {1, static_cast<std::uint64_t>(node->id)}));
        const int m = static_cast<int>(node->groups.size());
        std::set<std::pair<int, int>> cl_set = lift_cl_local(*node, raw_.n());
        std::vector<std::pair<int, int>> cl_groups(cl_set.begin(), cl_set.end());

        if (is_root) {
            Rng hrng(derive_seed(params_.seed, {2}));
            HeuristicResult base =
                multistart_baseline(centered_, params_.k, params_.restarts, hrng, SeedMode::PlusPlus);
            offer_incumbent(base, node->id);
            std::lock_guard lk(state_.mu);
            state_.ub0 = state_.ub;
        }

        // A node with exactly k groups admits exactly one clustering; its
        // value is an exact bound, no relaxation needed.
        if (m == params_.k) {
            HeuristicResult forced;
            forced.assignment.k = params_.k;
            forced.assignment.labels.assign(static_cast<std::size_t>(raw_.n()), 0);
            for (std::size_t g = 0; g < node->groups.size(); ++g)
                for (int p : node->groups[g]) forced.assignment.labels[static_cast<std::size_t>(p)] = static_cast<int>(g) + 1;
            forced.objective = mssc_objective(centered_, forced.assignment);
            offer_incumbent(forced, node->id);
            // The computed objective is itself a floating-point quantity; keep
            // the node bound rigorous by retreating a few ulps.
            double fp_margin = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(forced.objective));
            node->lb = std::max(node->lb, forced.objective - fp_margin);
            if (is_root) {
                std::lock_guard lk(state_.mu);
                state_.gap0 = 0.0;
                state_.gap_cp = 0.0;
            }
            fire_log(node, m, 0, 0, 0, {-1, -1}, "exact");
            fire_audit(node, lb_inherited, false, true);
            return;
        }

        ShrunkProblem p;
        p.w_shrunk = node->w_shrunk;
        p.mult = group_weights(node->groups);
        p.k = params_.k;
        p.cannot_link = cl_groups;
        p.cuts = node->pool;

        SolverOptions sopts;
        sopts.max_iter = params_.admm_max_iter;

        SdpSolution sol;
        bool have_sol = false;
        bool hit_time = false;
        int cp_iters = 0;
        long cuts_added = 0, cuts_purged = 0;
        const int cp_budget = is_root ? params_.cp_max_root : params_.cp_max_child;
        const double eps_cp = is_root ? params_.eps_cp_root : params_.eps_cp_child;

        for (int t = 0;; ++t) {
            if (out_of_time()) {
                hit_time = true;
                break;
            }
            std::vector<std::uint64_t> ids;
            ids.reserve(p.cuts.cuts.size());
            for (const Cut& c : p.cuts.cuts) ids.push_back(c.id);

            sol = solve(p, params_.sdp_tol, sopts, &node->warm, &ids);
            have_sol = true;
            ++cp_iters;
            SafeBoundReport sb = safe_lower_bound(p, sol, gram_c_.trace_w);
            double lb_before = node->lb;
            node->lb = std::max(node->lb, sb.lb_mssc);

            double ub_now = ub_snapshot();
            if (is_root && t == 0) {
                std::lock_guard lk(state_.mu);
                state_.gap0 = state_.ub0 != 0.0 ? std::max(0.0, (state_.ub0 - sb.lb_mssc) / std::abs(state_.ub0)) : 0.0;
            }

            // Bound-guided rounding refreshes the incumbent at every pass.
            if (auto res = sdp_round(sol.z, node->groups, centered_, cl_groups, params_.k, rng)) {
                offer_incumbent(*res, node->id);
                if (is_root) {
                    std::lock_guard lk(state_.mu);
                    state_.ub_cp = std::min(state_.ub_cp, res->objective);
                }
                ub_now = std::min(ub_now, res->objective);
            }

            if (node->lb >= ub_now) break;
            if ((ub_now - node->lb) <= params_.gap_tol * std::abs(ub_now)) break;
            if (t >= cp_budget) break;
            if (t > 0 && (node->lb - lb_before) < eps_cp * std::max(1.0, std::abs(node->lb))) break;

            // Refresh the pool: drop inactive rows (keeping any that still
            // carry a multiplier, i.e. support the bound), add violated ones.
            std::vector<double> duals(p.cuts.cuts.size(), 0.0);
            for (std::size_t c = 0; c < duals.size(); ++c)
                duals[c] = std::max(sol.v(static_cast<Eigen::Index>(c)), sol.w(static_cast<Eigen::Index>(c)));
            CutPool pool = purge_inactive(p.cuts, sol.z, &duals);
            cuts_purged += static_cast<long>(p.cuts.cuts.size() - pool.cuts.size());
            std::vector<Cut> fresh =
                separate_pairs_triangles(sol.z, pool, params_.separation_budget, params_.keep_fraction, rng);
            std::vector<Cut> cliques;
            {
                for (Cut& c : fresh) pool.cuts.push_back(std::move(c));
                cliques = separate_cliques(sol.z, params_.k, raw_.n(), pool);
                for (Cut& c : cliques) pool.cuts.push_back(std::move(c));
                std::lock_guard lk(state_.mu);
                for (Cut& c : pool.cuts)
                    if (c.id == 0) c.id = state_.next_cut_id++;
            }
            std::size_t added = fresh.size() + cliques.size();
            cuts_added += static_cast<long>(added);
            p.cuts = pool;
            node->pool = std::move(pool);
            if (added == 0) break;
            if (is_root) {
                std::lock_guard lk(state_.mu);
                state_.cp_root += 1;
                state_.cuts_cp_root += static_cast<long>(added);
            }
        }

        // Near-threshold polish: one tighter solve can close the node and
        // save a branching.
        if (have_sol && !hit_time) {
            double ub_now = ub_snapshot();
            if (node->lb < ub_now && std::isfinite(ub_now) &&
                (ub_now - node->lb) <= 10.0 * params_.gap_tol * std::abs(ub_now)) {
                std::vector<std::uint64_t> ids;
                for (const Cut& c : p.cuts.cuts) ids.push_back(c.id);
                sol = solve(p, params_.sdp_tol / 10.0, sopts, &node->warm, &ids);
                SafeBoundReport sb = safe_lower_bound(p, sol, gram_c_.trace_w);
                node->lb = std::max(node->lb, sb.lb_mssc);
            }
        }

        if (is_root) {
            std::lock_guard lk(state_.mu);
            double ub_now = state_.ub;
            state_.gap_cp = ub_now != 0.0 ? std::max(0.0, (ub_now - node->lb) / std::abs(ub_now)) : 0.0;
        }

        double ub_now = ub_snapshot();
        if (node->lb >= ub_now) {
            fire_log(node, m, cp_iters, cuts_added, cuts_purged, {-1, -1}, "prune");
            fire_audit(node, lb_inherited, false, false);
            return;
        }
        if (hit_time || (ub_now - node->lb) <= params_.gap_tol * std::abs(ub_now)) {
            if (hit_time) {
                std::lock_guard lk(state_.mu);
                state_.timed_out = true;
            }
            close_to_frontier(node->lb);
            fire_log(node, m, cp_iters, cuts_added, cuts_purged, {-1, -1}, hit_time ? "timeout" : "closed");
            fire_audit(node, lb_inherited, false, false);
            return;
        }

        std::optional<std::pair<int, int>> pick =
            have_sol ? select_branching_pair(sol.z, cl_set) : std::nullopt;
        if (!pick) {
            bool integral = false;
            if (have_sol) {
                if (auto rounded = round_components(sol.z, node->groups, cl_set)) {
                    offer_incumbent(*rounded, node->id);
                    integral = true;
                }
            }
            ub_now = ub_snapshot();
            if (node->lb >= ub_now || (ub_now - node->lb) <= params_.gap_tol * std::abs(ub_now)) {
                if (node->lb < ub_now) close_to_frontier(node->lb);
                fire_log(node, m, cp_iters, cuts_added, cuts_purged, {-1, -1},
                         integral ? "integral" : "closed");
                fire_audit(node, lb_inherited, false, integral);
                return;
            }
            // The relaxation looks integral but the bound has not caught up:
            // force a split on the strongest remaining coupling.
            double best = 0.0;
            std::pair<int, int> forced{-1, -1};
            if (have_sol) {
                for (int i = 0; i < m; ++i)
                    for (int j = i + 1; j < m; ++j)
                        if (cl_set.count({i, j}) == 0 && sol.z(i, j) > best) {
                            best = sol.z(i, j);
                            forced = {i, j};
                        }
            }
            if (best > 1e-8) {
                branch(node, forced);
                fire_log(node, m, cp_iters, cuts_added, cuts_purged, forced, "branch");
                fire_audit(node, lb_inherited, false, integral);
                return;
            }
            // The relaxation has gone (near-)diagonal and offers nothing to
            // split on. Small nodes close exactly by enumeration; larger ones
            // surrender their bound to the frontier.
            bool enumerable =
                params_.k == 1 || static_cast<double>(m) * std::log(static_cast<double>(params_.k)) <= 14.5;
            const char* fate = "frontier";
            if (enumerable) {
                std::optional<double> exact = enumerate_exact(node, cl_set);
                if (!exact) {
                    node->lb = std::numeric_limits<double>::infinity();  // infeasible node
                    fate = "infeasible";
                } else {
                    double fp_margin =
                        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(*exact));
                    node->lb = std::max(node->lb, *exact - fp_margin);
                    if (node->lb < ub_snapshot()) close_to_frontier(node->lb);
                    fate = "enumerated";
                }
            } else {
                close_to_frontier(node->lb);
            }
            fire_log(node, m, cp_iters, cuts_added, cuts_purged, {-1, -1}, fate);
            fire_audit(node, lb_inherited, false, integral);
            return;
        }

        branch(node, *pick);
        fire_log(node, m, cp_iters, cuts_added, cuts_purged, *pick, "branch");
        fire_audit(node, lb_inherited, false, false);
    }

    DataMatrix raw_;
    DataMatrix centered_;
    GramMatrix gram_c_;
    SolveParams params_;
    detail::SearchState state_;
};

/// Convenience wrapper: solve one dataset exactly.
inline SolveReport solve_exact(const DataMatrix& data, const SolveParams& params) {
    ExactSolver solver(data, params);
    return solver.run();
}

}  // namespace mssc
