#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <unordered_set>
#include <vector>

#include "mssc/common.hpp"
#include "mssc/rng.hpp"

namespace mssc {

enum class CutKind { Pair, Triangle, Clique };

/// One valid inequality on the relaxation variable Z (0-based indices):
///   Pair (i,j):        Z_ij - Z_ii <= 0                        (idx = {i,j})
///   Triangle (i,j,h):  Z_ij + Z_ih - Z_ii - Z_jh <= 0          (idx = {i,j,h})
///   Clique Q, |Q|=k+1: sum_{(i<j) in Q} Z_ij >= 1/(n-k+1)      (idx = sorted Q)
/// The clique right-hand side always uses the original point count n, which
/// stays valid (if weaker) under shrinking.
struct Cut {
    CutKind kind = CutKind::Pair;
    std::vector<int> idx;
    double rhs_lo = -std::numeric_limits<double>::infinity();
    double rhs_hi = std::numeric_limits<double>::infinity();
    /// Stable identity assigned by the solver when the cut enters a pool;
    /// survives purging and inheritance so multipliers can be carried over.
    /// Not part of the canonical key.
    std::uint64_t id = 0;

    /// Canonical identity key: pairs are ordered (the first index is the
    /// diagonal one), triangles order their two symmetric tail indices,
    /// cliques keep Q sorted.
    std::vector<int> key() const {
        std::vector<int> k_{static_cast<int>(kind)};
        k_.insert(k_.end(), idx.begin(), idx.end());
        return k_;
    }
};

inline Cut make_pair_cut(int i, int j) {
    Cut c;
    c.kind = CutKind::Pair;
    c.idx = {i, j};
    c.rhs_hi = 0.0;
    return c;
}

inline Cut make_triangle_cut(int i, int j, int h) {
    Cut c;
    c.kind = CutKind::Triangle;
    c.idx = {i, std::min(j, h), std::max(j, h)};
    c.rhs_hi = 0.0;
    return c;
}

inline Cut make_clique_cut(std::vector<int> q, int n_original, int k) {
    Cut c;
    c.kind = CutKind::Clique;
    std::sort(q.begin(), q.end());
    c.idx = std::move(q);
    c.rhs_lo = 1.0 / static_cast<double>(n_original - k + 1);
    return c;
}

/// Ordered cut collection plus the separation/purge tolerances.
struct CutPool {
    std::vector<Cut> cuts;
    double eps_viol = 1e-4;
    double eps_act = 1e-6;

    bool contains(const Cut& c) const {
        for (const Cut& other : cuts)
            if (other.kind == c.kind && other.idx == c.idx) return true;
        return false;
    }
};

namespace detail {

/// Set of canonical cut keys for O(1) duplicate checks.
struct CutKeySet {
    std::set<std::vector<int>> keys;
    void add(const Cut& c) { keys.insert(c.key()); }
    bool has(const Cut& c) const { return keys.count(c.key()) > 0; }
};

inline CutKeySet key_set(const CutPool& pool) {
    CutKeySet s;
    for (const Cut& c : pool.cuts) s.add(c);
    return s;
}

}  // namespace detail

/// Value of the cut's constraint function at z.
inline double cut_lhs(const Cut& c, const Matrix& z) {
    int m = static_cast<int>(z.rows());
    for (int ix : c.idx)
        if (ix < 0 || ix >= m)
            throw IndexOutOfRange("cut index " + std::to_string(ix) + " outside matrix of size " + std::to_string(m));
    switch (c.kind) {
        case CutKind::Pair:
            return z(c.idx[0], c.idx[1]) - z(c.idx[0], c.idx[0]);
        case CutKind::Triangle:
            return z(c.idx[0], c.idx[1]) + z(c.idx[0], c.idx[2]) - z(c.idx[0], c.idx[0]) - z(c.idx[1], c.idx[2]);
        case CutKind::Clique: {
            double s = 0.0;
            for (std::size_t a = 0; a < c.idx.size(); ++a)
                for (std::size_t b = a + 1; b < c.idx.size(); ++b) s += z(c.idx[a], c.idx[b]);
            return s;
        }
    }
    return 0.0;
}

/// Positive = amount by which z violates the cut; <= 0 means satisfied.
inline double violation(const Cut& c, const Matrix& z) {
    double lhs = cut_lhs(c, z);
    double v = -std::numeric_limits<double>::infinity();
    if (std::isfinite(c.rhs_hi)) v = std::max(v, lhs - c.rhs_hi);
    if (std::isfinite(c.rhs_lo)) v = std::max(v, c.rhs_lo - lhs);
    return v;
}

/// Signed distance from the nearest bound; ~0 means the cut is active at z.
inline double cut_slack(const Cut& c, const Matrix& z) {
    double lhs = cut_lhs(c, z);
    double s = std::numeric_limits<double>::infinity();
    if (std::isfinite(c.rhs_hi)) s = std::min(s, c.rhs_hi - lhs);
    if (std::isfinite(c.rhs_lo)) s = std::min(s, lhs - c.rhs_lo);
    return s;
}

/// Randomly samples pair and triangle inequalities violated by at least
/// pool.eps_viol, and keeps the ceil(keep_fraction * found) most violated per
/// family (ties broken by index tuple so a fixed seed gives a fixed answer).
/// Sampling is without replacement within the call via a seen-set; tuples
/// already in the pool are never returned.
inline std::vector<Cut> separate_pairs_triangles(const Matrix& z, const CutPool& pool, int budget_t,
                                                 double keep_fraction, Rng& rng) {
    int m = static_cast<int>(z.rows());
    std::vector<Cut> out;
    if (m < 2) return out;

    detail::CutKeySet seen = detail::key_set(pool);

    struct Scored {
        double viol;
        Cut cut;
    };
    auto score_order = [](const Scored& a, const Scored& b) {
        if (a.viol != b.viol) return a.viol > b.viol;
        return a.cut.key() < b.cut.key();
    };

    auto run_family = [&](bool triangles) {
        std::vector<Scored> violated;
        detail::CutKeySet tried;
        std::uint64_t space = triangles
                                  ? static_cast<std::uint64_t>(m) * (m - 1) * (m - 2) / 2
                                  : static_cast<std::uint64_t>(m) * (m - 1);
        std::uint64_t target = std::min<std::uint64_t>(static_cast<std::uint64_t>(budget_t), space);
        std::uint64_t drawn = 0;
        std::uint64_t attempts = 0;
        std::uint64_t max_attempts = 8 * static_cast<std::uint64_t>(budget_t) + 64;
        while (drawn < target && attempts < max_attempts) {
            ++attempts;
            Cut c;
            if (triangles) {
                if (m < 3) break;
                int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
                int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
                int h = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
                if (i == j || i == h || j == h) continue;
                c = make_triangle_cut(i, j, h);
            } else {
                int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
                int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
                if (i == j) continue;
                c = make_pair_cut(i, j);
            }
            if (tried.has(c)) continue;
            tried.add(c);
            ++drawn;
            if (seen.has(c)) continue;
            double v = violation(c, z);
            if (v >= pool.eps_viol) violated.push_back({v, std::move(c)});
        }
        std::sort(violated.begin(), violated.end(), score_order);
        std::size_t keep = violated.empty()
                               ? 0
                               : static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(violated.size())));
        keep = std::min(keep, violated.size());
        for (std::size_t t = 0; t < keep; ++t) {
            seen.add(violated[t].cut);
            out.push_back(std::move(violated[t].cut));
        }
    };

    run_family(false);
    run_family(true);
    return out;
}

/// Greedy clique separation: grow Q from each seed point by repeatedly adding
/// the index with the smallest total affinity sum_{q in Q} Z_qj (ties to the
/// smallest index) until |Q| = k+1; emit the clique if it is violated by at
/// least pool.eps_viol. Duplicate sets and cuts already pooled are dropped.
inline std::vector<Cut> separate_cliques(const Matrix& z, int k, int n_original, const CutPool& pool) {
    int m = static_cast<int>(z.rows());
    std::vector<Cut> out;
    if (m < k + 1) return out;

    detail::CutKeySet seen = detail::key_set(pool);
    for (int seed = 0; seed < m; ++seed) {
        std::vector<int> q{seed};
        std::vector<char> in_q(static_cast<std::size_t>(m), 0);
        in_q[static_cast<std::size_t>(seed)] = 1;
        std::vector<double> affinity(static_cast<std::size_t>(m), 0.0);
        for (int j = 0; j < m; ++j) affinity[static_cast<std::size_t>(j)] = z(seed, j);
        while (static_cast<int>(q.size()) < k + 1) {
            int best = -1;
            double best_val = std::numeric_limits<double>::infinity();
            for (int j = 0; j < m; ++j) {
                if (in_q[static_cast<std::size_t>(j)]) continue;
                if (affinity[static_cast<std::size_t>(j)] < best_val) {
                    best_val = affinity[static_cast<std::size_t>(j)];
                    best = j;
                }
            }
            q.push_back(best);
            in_q[static_cast<std::size_t>(best)] = 1;
            for (int j = 0; j < m; ++j) affinity[static_cast<std::size_t>(j)] += z(best, j);
        }
        Cut c = make_clique_cut(std::move(q), n_original, k);
        if (seen.has(c)) continue;
        seen.add(c);
        if (violation(c, z) >= pool.eps_viol) out.push_back(std::move(c));
    }
    return out;
}

/// Keeps the cuts active at z (|slack| <= eps_act); everything else is
/// removed. When the per-cut multipliers are supplied, a cut whose multiplier
/// is materially positive is also kept: it is supporting the current bound
/// even if an inexact z reports a slightly loose slack.
inline CutPool purge_inactive(const CutPool& pool, const Matrix& z, const std::vector<double>* duals_vw = nullptr) {
    CutPool kept;
    kept.eps_viol = pool.eps_viol;
    kept.eps_act = pool.eps_act;
    for (std::size_t c = 0; c < pool.cuts.size(); ++c) {
        bool active = std::abs(cut_slack(pool.cuts[c], z)) <= pool.eps_act;
        if (!active && duals_vw && c < duals_vw->size() && (*duals_vw)[c] > 1e-8) active = true;
        if (active) kept.cuts.push_back(pool.cuts[c]);
    }
    return kept;
}

namespace detail {

/// Remaps one index under the merge (i,j) -> i with j removed; returns -1 if
/// the index disappears into the merge representative ambiguously (never
/// happens: j maps to i).
inline int remap_index(int ix, int i, int j) {
    if (ix == j) return i;
    if (ix > j) return ix - 1;
    return ix;
}

}  // namespace detail

/// Cut inheritance under the merge of local indices i < j: cuts touching both
/// endpoints are dropped, j is rewritten to i, indices above j shift down by
/// one, duplicates after remapping are deduplicated, and cliques that lost a
/// member are dropped.
inline CutPool inherit_remap(const CutPool& pool, int i, int j) {
    if (i >= j) throw Error("inherit_remap expects i < j");
    CutPool out;
    out.eps_viol = pool.eps_viol;
    out.eps_act = pool.eps_act;
    detail::CutKeySet seen;
    for (const Cut& c : pool.cuts) {
        bool touches_i = std::find(c.idx.begin(), c.idx.end(), i) != c.idx.end();
        bool touches_j = std::find(c.idx.begin(), c.idx.end(), j) != c.idx.end();
        if (touches_i && touches_j) continue;
        Cut r = c;
        for (int& ix : r.idx) ix = detail::remap_index(ix, i, j);
        // Restore canonical ordering where the remap may have disturbed it.
        if (r.kind == CutKind::Triangle) {
            int a = r.idx[1], b = r.idx[2];
            r.idx[1] = std::min(a, b);
            r.idx[2] = std::max(a, b);
            if (r.idx[0] == r.idx[1] || r.idx[1] == r.idx[2]) continue;  // degenerate after merge
        } else if (r.kind == CutKind::Clique) {
            std::sort(r.idx.begin(), r.idx.end());
            if (std::adjacent_find(r.idx.begin(), r.idx.end()) != r.idx.end()) continue;
            if (static_cast<int>(r.idx.size()) < static_cast<int>(c.idx.size())) continue;
        } else {
            if (r.idx[0] == r.idx[1]) continue;
        }
        if (seen.has(r)) continue;
        seen.add(r);
        out.cuts.push_back(std::move(r));
    }
    return out;
}

}  // namespace mssc
