#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mssc/common.hpp"
#include "mssc/dataset.hpp"
#include "mssc/detail/eig.hpp"
#include "mssc/rng.hpp"

namespace mssc {

/// A feasible clustering produced by a heuristic, with its objective value.
struct HeuristicResult {
    Assignment assignment;
    double objective = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Mean of the points listed in `members`.
inline Vector members_centroid(const Matrix& pts, const std::vector<int>& members) {
    Vector c = Vector::Zero(pts.cols());
    for (int p : members) c += pts.row(p).transpose();
    return c / static_cast<double>(members.size());
}

}  // namespace detail

/// Centroids of each group of points, one row per group.
inline Matrix group_centroids(const DataMatrix& data, const std::vector<std::vector<int>>& groups) {
    Matrix out(static_cast<Eigen::Index>(groups.size()), data.d());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw EmptyCluster("group " + std::to_string(g) + " has no members");
        out.row(static_cast<Eigen::Index>(g)) = detail::members_centroid(data.points, groups[g]).transpose();
    }
    return out;
}

inline Vector group_weights(const std::vector<std::vector<int>>& groups) {
    Vector w(static_cast<Eigen::Index>(groups.size()));
    for (std::size_t g = 0; g < groups.size(); ++g) w(static_cast<Eigen::Index>(g)) = static_cast<double>(groups[g].size());
    return w;
}

/// Weighted D^2 seeding over the rows of `pts`: the first row is drawn with
/// probability proportional to its weight, each further row with probability
/// proportional to weight times squared distance to the nearest chosen row.
/// Sampling inverts the cumulative sum with one uniform draw; if the total
/// mass vanishes (all rows coincide with a chosen one) the smallest unchosen
/// index is taken.
inline std::vector<int> kmeans_pp_indices(const Matrix& pts, const Vector& wts, int k, Rng& rng) {
    const int n = static_cast<int>(pts.rows());
    if (k < 1 || k > n) throw InvalidK("seeding asks for " + std::to_string(k) + " of " + std::to_string(n) + " rows");
    std::vector<int> chosen;
    std::vector<char> is_chosen(static_cast<std::size_t>(n), 0);
    Vector d2 = Vector::Constant(n, std::numeric_limits<double>::infinity());

    auto draw = [&](const Vector& mass) {
        std::vector<double> cum(static_cast<std::size_t>(n));
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            total += std::max(mass(i), 0.0);
            cum[static_cast<std::size_t>(i)] = total;
        }
        if (!(total > 0.0)) {
            for (int i = 0; i < n; ++i)
                if (!is_chosen[static_cast<std::size_t>(i)]) return i;
            return n - 1;
        }
        double r = rng.uniform01() * total;
        auto it = std::upper_bound(cum.begin(), cum.end(), r);
        int ix = static_cast<int>(it - cum.begin());
        return std::min(ix, n - 1);
    };

    for (int t = 0; t < k; ++t) {
        int pick;
        if (t == 0) {
            pick = draw(wts);
        } else {
            Vector mass = wts.cwiseProduct(d2);
            for (int i = 0; i < n; ++i)
                if (is_chosen[static_cast<std::size_t>(i)]) mass(i) = 0.0;
            pick = draw(mass);
        }
        chosen.push_back(pick);
        is_chosen[static_cast<std::size_t>(pick)] = 1;
        for (int i = 0; i < n; ++i) {
            double dd = (pts.row(i) - pts.row(pick)).squaredNorm();
            if (dd < d2(i)) d2(i) = dd;
        }
    }
    return chosen;
}

namespace detail {

/// Weighted Lloyd iteration over the rows of `pts` (used both for plain
/// k-means on points and for clustering group representatives). Ties in the
/// assignment go to the lowest centroid id; an emptied cluster steals the
/// row farthest from its centroid out of the heaviest cluster that can spare
/// one. Returns 0-based row labels.
inline std::vector<int> weighted_lloyd_rows(const Matrix& pts, const Vector& wts, int k, Matrix centroids,
                                            int max_iter = 500) {
    const int n = static_cast<int>(pts.rows());
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<int> next(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (pts.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (pts.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            next[static_cast<std::size_t>(i)] = best;
        }
        // Repair empty clusters.
        bool repaired = false;
        std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            mass[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])] += wts(i);
            ++count[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (count[static_cast<std::size_t>(c)] > 0) continue;
            int donor = -1;
            double donor_mass = -1.0;
            for (int c2 = 0; c2 < k; ++c2)
                if (count[static_cast<std::size_t>(c2)] > 1 && mass[static_cast<std::size_t>(c2)] > donor_mass) {
                    donor_mass = mass[static_cast<std::size_t>(c2)];
                    donor = c2;
                }
            if (donor < 0) break;
            int steal = -1;
            double steal_d = -1.0;
            for (int i = 0; i < n; ++i)
                if (next[static_cast<std::size_t>(i)] == donor) {
                    double d = (pts.row(i) - centroids.row(donor)).squaredNorm();
                    if (d > steal_d) {
                        steal_d = d;
                        steal = i;
                    }
                }
            next[static_cast<std::size_t>(steal)] = c;
            --count[static_cast<std::size_t>(donor)];
            ++count[static_cast<std::size_t>(c)];
            mass[static_cast<std::size_t>(donor)] -= wts(steal);
            mass[static_cast<std::size_t>(c)] += wts(steal);
            repaired = true;
        }
        // Update centroids.
        centroids.setZero();
        std::vector<double> tot(static_cast<std::size_t>(k), 0.0);
        for (int i = 0; i < n; ++i) {
            centroids.row(next[static_cast<std::size_t>(i)]) += wts(i) * pts.row(i);
            tot[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])] += wts(i);
        }
        for (int c = 0; c < k; ++c)
            if (tot[static_cast<std::size_t>(c)] > 0.0) centroids.row(c) /= tot[static_cast<std::size_t>(c)];
        if (!repaired && next == labels) break;
        labels = std::move(next);
    }
    return labels;
}

}  // namespace detail

/// Constrained assignment engine shared by every heuristic: groups of points
/// move as units (must-link), group pairs in `cl_groups` may never share a
/// cluster (cannot-link). Groups are visited in ascending order and take the
/// nearest centroid that causes no conflict with groups placed earlier in the
/// same pass; a pass with no feasible centroid for some group fails. Emptied
/// clusters steal the farthest group from the heaviest cluster that can spare
/// one. With singleton groups and no constraints this is exactly Lloyd's
/// method. Returns the clustering over points, or nothing on a dead end.
inline std::optional<HeuristicResult> constrained_kmeans(const DataMatrix& data,
                                                         const std::vector<std::vector<int>>& groups,
                                                         const std::vector<std::pair<int, int>>& cl_groups, int k,
                                                         Matrix centroids, int max_iter = 500) {
    const int ng = static_cast<int>(groups.size());
    if (k < 1 || k > ng) return std::nullopt;
    if (centroids.rows() != k || centroids.cols() != data.d())
        throw DimensionMismatch("constrained_kmeans: centroid matrix must be k x d");
    Matrix reps = group_centroids(data, groups);
    Vector wts = group_weights(groups);
    std::set<std::pair<int, int>> cl;
    for (auto [a, b] : cl_groups) {
        if (a == b) return std::nullopt;
        cl.insert({std::min(a, b), std::max(a, b)});
    }

    std::vector<int> labels(static_cast<std::size_t>(ng), -1);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<int> next(static_cast<std::size_t>(ng), -1);
        std::vector<std::vector<int>> cluster_groups(static_cast<std::size_t>(k));
        for (int g = 0; g < ng; ++g) {
            std::vector<int> order(static_cast<std::size_t>(k));
            std::iota(order.begin(), order.end(), 0);
            std::vector<double> dist(static_cast<std::size_t>(k));
            for (int c = 0; c < k; ++c) dist[static_cast<std::size_t>(c)] = (reps.row(g) - centroids.row(c)).squaredNorm();
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)])
                    return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
                return a < b;
            });
            int placed = -1;
            for (int c : order) {
                bool ok = true;
                for (int g2 : cluster_groups[static_cast<std::size_t>(c)])
                    if (cl.count({std::min(g, g2), std::max(g, g2)})) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    placed = c;
                    break;
                }
            }
            if (placed < 0) return std::nullopt;
            next[static_cast<std::size_t>(g)] = placed;
            cluster_groups[static_cast<std::size_t>(placed)].push_back(g);
        }

        // Repair empty clusters: steal the farthest group from the heaviest
        // cluster that keeps at least one group (an empty target can never
        // conflict).
        bool repaired = false;
        for (int c = 0; c < k; ++c) {
            if (!cluster_groups[static_cast<std::size_t>(c)].empty()) continue;
            int donor = -1;
            double donor_mass = -1.0;
            for (int c2 = 0; c2 < k; ++c2) {
                const auto& cg = cluster_groups[static_cast<std::size_t>(c2)];
                if (static_cast<int>(cg.size()) < 2) continue;
                double mass = 0.0;
                for (int g : cg) mass += wts(g);
                if (mass > donor_mass) {
                    donor_mass = mass;
                    donor = c2;
                }
            }
            if (donor < 0) return std::nullopt;
            int steal = -1;
            double steal_d = -1.0;
            for (int g : cluster_groups[static_cast<std::size_t>(donor)]) {
                double d = (reps.row(g) - centroids.row(donor)).squaredNorm();
                if (d > steal_d) {
                    steal_d = d;
                    steal = g;
                }
            }
            auto& dg = cluster_groups[static_cast<std::size_t>(donor)];
            dg.erase(std::find(dg.begin(), dg.end(), steal));
            cluster_groups[static_cast<std::size_t>(c)].push_back(steal);
            next[static_cast<std::size_t>(steal)] = c;
            repaired = true;
        }

        centroids.setZero();
        std::vector<double> tot(static_cast<std::size_t>(k), 0.0);
        for (int g = 0; g < ng; ++g) {
            centroids.row(next[static_cast<std::size_t>(g)]) += wts(g) * reps.row(g);
            tot[static_cast<std::size_t>(next[static_cast<std::size_t>(g)])] += wts(g);
        }
        for (int c = 0; c < k; ++c)
            if (tot[static_cast<std::size_t>(c)] > 0.0) centroids.row(c) /= tot[static_cast<std::size_t>(c)];
        if (!repaired && next == labels) break;
        labels = std::move(next);
    }

    HeuristicResult res;
    res.assignment.k = k;
    res.assignment.labels.assign(static_cast<std::size_t>(data.n()), 0);
    for (int g = 0; g < ng; ++g)
        for (int p : groups[static_cast<std::size_t>(g)])
            res.assignment.labels[static_cast<std::size_t>(p)] = labels[static_cast<std::size_t>(g)] + 1;
    res.objective = mssc_objective(data, res.assignment);
    return res;
}

/// Plain Lloyd iteration from explicit starting centroids.
inline HeuristicResult lloyd(const DataMatrix& data, int k, const Matrix& centroids, int max_iter = 500) {
    std::vector<std::vector<int>> singles(static_cast<std::size_t>(data.n()));
    for (int i = 0; i < data.n(); ++i) singles[static_cast<std::size_t>(i)] = {i};
    auto res = constrained_kmeans(data, singles, {}, k, centroids, max_iter);
    if (!res) throw Error("unconstrained lloyd cannot fail");
    return *res;
}

namespace detail {

/// Union-find closure of must-link pairs into groups ordered by smallest
/// member; the representative order makes every caller deterministic.
inline std::vector<std::vector<int>> ml_closure(int n, const std::vector<std::pair<int, int>>& ml_pairs) {
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (auto [a, b] : ml_pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw IndexOutOfRange("must-link endpoint outside dataset");
        int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    std::map<int, std::vector<int>> by_root;
    for (int i = 0; i < n; ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<int>> groups;
    groups.reserve(by_root.size());
    for (auto& [root, members] : by_root) groups.push_back(std::move(members));
    return groups;
}

/// Lifts point-level cannot-link pairs onto group indices; nothing if some
/// pair falls inside one group.
inline std::optional<std::vector<std::pair<int, int>>> lift_cl(const std::vector<std::vector<int>>& groups, int n,
                                                               const std::vector<std::pair<int, int>>& cl_pairs) {
    std::vector<int> group_of(static_cast<std::size_t>(n), -1);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int p : groups[g]) group_of[static_cast<std::size_t>(p)] = static_cast<int>(g);
    std::set<std::pair<int, int>> lifted;
    for (auto [a, b] : cl_pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw IndexOutOfRange("cannot-link endpoint outside dataset");
        int ga = group_of[static_cast<std::size_t>(a)], gb = group_of[static_cast<std::size_t>(b)];
        if (ga == gb) return std::nullopt;
        lifted.insert({std::min(ga, gb), std::max(ga, gb)});
    }
    return std::vector<std::pair<int, int>>(lifted.begin(), lifted.end());
}

}  // namespace detail

/// Constrained k-means over must-link/cannot-link point pairs: must-link
/// closure forms the groups, then the best of `restarts` seeded runs of the
/// constrained engine is kept. Nothing is returned when the constraints admit
/// no clustering the engine can reach.
inline std::optional<HeuristicResult> cop_kmeans(const DataMatrix& data, int k,
                                                 const std::vector<std::pair<int, int>>& ml_pairs,
                                                 const std::vector<std::pair<int, int>>& cl_pairs, int restarts,
                                                 Rng& rng) {
    auto groups = detail::ml_closure(data.n(), ml_pairs);
    auto cl_groups = detail::lift_cl(groups, data.n(), cl_pairs);
    if (!cl_groups) return std::nullopt;
    if (static_cast<int>(groups.size()) < k) return std::nullopt;

    Matrix reps = group_centroids(data, groups);
    Vector wts = group_weights(groups);
    std::optional<HeuristicResult> best;
    for (int r = 0; r < std::max(restarts, 1); ++r) {
        std::vector<int> seed = kmeans_pp_indices(reps, wts, k, rng);
        Matrix centroids(k, data.d());
        for (int c = 0; c < k; ++c) centroids.row(c) = reps.row(seed[static_cast<std::size_t>(c)]);
        auto res = constrained_kmeans(data, groups, *cl_groups, k, centroids);
        if (res && (!best || res->objective < best->objective)) best = res;
    }
    if (best) {
        // Verify the contract on the way out.
        for (auto [a, b] : ml_pairs)
            if (best->assignment.labels[static_cast<std::size_t>(a)] != best->assignment.labels[static_cast<std::size_t>(b)])
                return std::nullopt;
        for (auto [a, b] : cl_pairs)
            if (best->assignment.labels[static_cast<std::size_t>(a)] == best->assignment.labels[static_cast<std::size_t>(b)])
                return std::nullopt;
    }
    return best;
}

/// Rounds a relaxation solution into a feasible clustering: the top-k
/// eigenpairs of z give a low-rank smoothing, whose product with the group
/// feature sums yields one representative row per group; those rows are
/// clustered and the result seeds the constrained engine on the real data.
/// Falls back to plain seeding when the spectrum carries fewer than k
/// positive directions. `z` and `groups` live in the same (shrunk) index
/// space; the result is over original points.
inline std::optional<HeuristicResult> sdp_round(const Matrix& z, const std::vector<std::vector<int>>& groups,
                                                const DataMatrix& data,
                                                const std::vector<std::pair<int, int>>& cl_groups, int k, Rng& rng) {
    const int m = static_cast<int>(z.rows());
    if (static_cast<int>(groups.size()) != m) throw DimensionMismatch("sdp_round: z and groups disagree");
    if (k > m) return std::nullopt;

    Matrix reps = group_centroids(data, groups);
    Vector wts = group_weights(groups);

    Matrix seed_rows;
    detail::SymEig eig = detail::sym_eig(((z + z.transpose()) * 0.5).eval());
    int positive = 0;
    for (int i = 0; i < m; ++i)
        if (eig.values(i) > 1e-10) ++positive;
    if (positive >= k) {
        Matrix zhat = Matrix::Zero(m, m);
        for (int t = 0; t < k; ++t) {
            int i = m - 1 - t;  // top of the ascending spectrum
            zhat.noalias() += eig.values(i) * (eig.vectors.col(i) * eig.vectors.col(i).transpose());
        }
        Matrix sums(m, data.d());
        for (int g = 0; g < m; ++g) {
            Vector s = Vector::Zero(data.d());
            for (int p : groups[static_cast<std::size_t>(g)]) s += data.points.row(p).transpose();
            sums.row(g) = s.transpose();
        }
        seed_rows = zhat * sums;
    } else {
        seed_rows = reps;  // degenerate spectrum: plain representative seeding
    }

    std::vector<int> pick = kmeans_pp_indices(seed_rows, wts, k, rng);
    Matrix rep_centroids(k, seed_rows.cols());
    for (int c = 0; c < k; ++c) rep_centroids.row(c) = seed_rows.row(pick[static_cast<std::size_t>(c)]);
    std::vector<int> row_labels = detail::weighted_lloyd_rows(seed_rows, wts, k, rep_centroids);

    // Turn the representative clustering into data-space centroids and polish
    // with the constrained engine.
    Matrix centroids = Matrix::Zero(k, data.d());
    std::vector<double> tot(static_cast<std::size_t>(k), 0.0);
    for (int g = 0; g < m; ++g) {
        centroids.row(row_labels[static_cast<std::size_t>(g)]) += wts(g) * reps.row(g);
        tot[static_cast<std::size_t>(row_labels[static_cast<std::size_t>(g)])] += wts(g);
    }
    for (int c = 0; c < k; ++c) {
        if (tot[static_cast<std::size_t>(c)] > 0.0)
            centroids.row(c) /= tot[static_cast<std::size_t>(c)];
        else
            centroids.row(c) = reps.row(static_cast<Eigen::Index>(c % m));
    }
    return constrained_kmeans(data, groups, cl_groups, k, centroids);
}

enum class SeedMode { PlusPlus, UniformRows };

/// Best of `restarts` Lloyd runs from k-means++ or uniformly drawn distinct
/// starting points.
inline HeuristicResult multistart_baseline(const DataMatrix& data, int k, int restarts, Rng& rng,
                                           SeedMode mode = SeedMode::PlusPlus) {
    const int n = data.n();
    if (k < 1 || k > n) throw InvalidK("multistart asks for k=" + std::to_string(k) + " with n=" + std::to_string(n));
    HeuristicResult best;
    Vector unit = Vector::Ones(n);
    for (int r = 0; r < std::max(restarts, 1); ++r) {
        std::vector<int> pick;
        if (mode == SeedMode::PlusPlus) {
            pick = kmeans_pp_indices(data.points, unit, k, rng);
        } else {
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), 0);
            for (int t = 0; t < k; ++t) {
                std::uint64_t off = rng.below(static_cast<std::uint64_t>(n - t));
                std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(t) + static_cast<std::size_t>(off)]);
            }
            pick.assign(idx.begin(), idx.begin() + k);
        }
        Matrix centroids(k, data.d());
        for (int c = 0; c < k; ++c) centroids.row(c) = data.points.row(pick[static_cast<std::size_t>(c)]);
        HeuristicResult res = lloyd(data, k, centroids);
        if (res.objective < best.objective) best = res;
    }
    return best;
}

}  // namespace mssc
