#pragma once

// Helpers shared by the test suites: exhaustive partition oracles and small
// random instances. Everything here is deliberately naive — the point is to
// check the library against code too simple to be wrong.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mssc/branch_bound.hpp"
#include "mssc/dataset.hpp"
#include "mssc/rng.hpp"

namespace support {

/// Enumerates every partition of {0..n-1} into exactly k nonempty blocks as
/// 1-based label vectors in canonical (first-appearance) order, via restricted
/// growth strings.
inline void enumerate_partitions(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int pos, int used) {
        if (pos == n) {
            if (used == k) fn(labels);
            return;
        }
        // Pruning: remaining positions must be able to open the missing blocks.
        if (used + (n - pos) < k) return;
        int cap = std::min(used + 1, k);
        for (int b = 1; b <= cap; ++b) {
            labels[static_cast<std::size_t>(pos)] = b;
            rec(pos + 1, std::max(used, b));
        }
    };
    rec(0, 0);
}

/// Exhaustive minimum of the clustering objective over all k-partitions.
/// Returns the canonical optimal label vector and its objective, computed by
/// the library's own evaluation so comparisons can be bit-exact.
inline std::pair<double, std::vector<int>> brute_force_mssc(const mssc::DataMatrix& data, int k) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_labels;
    enumerate_partitions(data.n(), k, [&](const std::vector<int>& labels) {
        mssc::Assignment a;
        a.labels = labels;
        a.k = k;
        double obj = mssc::mssc_objective(data, a);
        if (obj < best) {
            best = obj;
            best_labels = labels;
        }
    });
    return {best, best_labels};
}

/// Exhaustive constrained minimum: groups must stay whole (must-link) and no
/// cannot-link pair may share a cluster. Returns nothing when no feasible
/// k-partition exists.
inline std::optional<double> brute_force_constrained(const mssc::DataMatrix& data, int k,
                                                     const std::vector<std::vector<int>>& groups,
                                                     const std::vector<std::pair<int, int>>& cl_global) {
    int m = static_cast<int>(groups.size());
    if (m < k) return std::nullopt;
    std::vector<int> group_of(static_cast<std::size_t>(data.n()), -1);
    for (int g = 0; g < m; ++g)
        for (int p : groups[static_cast<std::size_t>(g)]) group_of[static_cast<std::size_t>(p)] = g;

    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    enumerate_partitions(m, k, [&](const std::vector<int>& glabels) {
        for (auto [a, b] : cl_global)
            if (glabels[static_cast<std::size_t>(group_of[static_cast<std::size_t>(a)])] ==
                glabels[static_cast<std::size_t>(group_of[static_cast<std::size_t>(b)])])
                return;
        mssc::Assignment a;
        a.k = k;
        a.labels.resize(static_cast<std::size_t>(data.n()));
        for (int p = 0; p < data.n(); ++p)
            a.labels[static_cast<std::size_t>(p)] =
                glabels[static_cast<std::size_t>(group_of[static_cast<std::size_t>(p)])];
        double obj = mssc::mssc_objective(data, a);
        if (obj < best) {
            best = obj;
            found = true;
        }
    });
    if (!found) return std::nullopt;
    return best;
}

/// Small random Gaussian-cloud instance (points uniform in a box plus jitter),
/// deterministic per seed.
inline mssc::DataMatrix random_instance(int n, int d, mssc::Rng& rng) {
    mssc::DataMatrix data;
    data.points.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) data.points(i, j) = rng.uniform(-2.0, 2.0) + 0.25 * rng.normal();
    return data;
}

/// Clustering matrix of a random k-partition (1-based labels drawn until all
/// clusters are nonempty).
inline mssc::Assignment random_partition(int n, int k, mssc::Rng& rng) {
    mssc::Assignment a;
    a.k = k;
    for (;;) {
        a.labels.assign(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) a.labels[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        std::vector<bool> seen(static_cast<std::size_t>(k + 1), false);
        for (int l : a.labels) seen[static_cast<std::size_t>(l)] = true;
        bool ok = true;
        for (int j = 1; j <= k; ++j) ok = ok && seen[static_cast<std::size_t>(j)];
        if (ok) return a;
    }
}

}  // namespace support
