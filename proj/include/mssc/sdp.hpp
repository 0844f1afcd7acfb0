#pragma once

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "mssc/common.hpp"
#include "mssc/cuts.hpp"
#include "mssc/dataset.hpp"
#include "mssc/detail/eig.hpp"

namespace mssc {

/// One branch-and-bound node's semidefinite subproblem over the shrunk
/// variable Z (m x m, m = n - merges):
///   min <-w_shrunk, Z>
///   s.t. Z mult = 1,  <Diag(mult), Z> = k,  Z_ab = 0 for (a,b) in cannot_link,
///        all cuts in `cuts`,  Z >= 0 entrywise,  Z psd.
struct ShrunkProblem {
    Matrix w_shrunk;
    Vector mult;
    int k = 0;
    std::vector<std::pair<int, int>> cannot_link;  // 0-based local pairs, a < b
    CutPool cuts;

    int m() const { return static_cast<int>(mult.size()); }
};

/// Root relaxation: full dimension, unit multiplicities, no side constraints.
inline ShrunkProblem build_root(const GramMatrix& g, int k) {
    int n = static_cast<int>(g.w.rows());
    if (k < 1 || k > n) throw InvalidK("k must be in {1.." + std::to_string(n) + "}, got " + std::to_string(k));
    ShrunkProblem p;
    p.w_shrunk = g.w;
    p.mult = Vector::Ones(n);
    p.k = k;
    return p;
}

/// Primal-dual output of one subproblem solve. The dual pieces are exactly
/// what the rigorous lower-bound post-processing consumes:
///   y: multipliers of the m row-sum equalities and (last entry) the trace;
///   u: multipliers of the cannot-link equalities (free sign);
///   v/w: nonnegative lower-/upper-bound multipliers per cut, in pool order;
///   p_nonneg: multiplier of the entrywise nonnegativity constraint.
struct SdpSolution {
    Matrix z;
    double obj_sdp = 0.0;
    Vector y;
    Vector u;
    Vector v;
    Vector w;
    Matrix p_nonneg;
    double kkt_residual = std::numeric_limits<double>::infinity();

    // Diagnostics and warm-start state.
    bool converged = false;
    bool infeasible_suspected = false;
    int iterations = 0;
    double pinf = std::numeric_limits<double>::infinity();
    double dinf = std::numeric_limits<double>::infinity();
    double gap_rel = std::numeric_limits<double>::infinity();
    double min_eig_z = 0.0;
    double min_entry_z = 0.0;
    Vector cut_slack;     // primal slack estimate per cut
    double sigma_final = 1.0;
    Matrix s_psd;         // dual slack matrix estimate (unscaled)
};

/// Maximum absolute violations of each primal constraint family at z.
struct Residuals {
    double row_sum_err = 0.0;
    double trace_err = 0.0;
    double cl_err = 0.0;
    double cut_err = 0.0;
    double neg_eig = 0.0;
    double neg_entry = 0.0;

    double max_all() const {
        return std::max({row_sum_err, trace_err, cl_err, cut_err, neg_eig, neg_entry});
    }
};

inline Residuals primal_residuals(const ShrunkProblem& p, const Matrix& z) {
    int m = p.m();
    if (z.rows() != m || z.cols() != m) throw DimensionMismatch("primal_residuals: z has wrong size");
    Residuals r;
    Vector row = z * p.mult;
    r.row_sum_err = (row - Vector::Ones(m)).cwiseAbs().maxCoeff();
    r.trace_err = std::abs(p.mult.dot(z.diagonal()) - static_cast<double>(p.k));
    for (auto [a, b] : p.cannot_link) r.cl_err = std::max(r.cl_err, std::abs(z(a, b)));
    for (const Cut& c : p.cuts.cuts) r.cut_err = std::max(r.cut_err, std::max(0.0, violation(c, z)));
    detail::PartialEig neg = detail::sym_eig_below(((z + z.transpose()) * 0.5).eval(), 0.0);
    r.neg_eig = neg.count > 0 ? std::max(0.0, -neg.values[0]) : 0.0;
    r.neg_entry = std::max(0.0, -z.minCoeff());
    return r;
}

/// Options of the first-order solver.
struct SolverOptions {
    int max_iter = 20000;
    double sigma0 = 0.1;
    double over_relax = 1.618;
    int adapt_interval = 10;
    double adapt_ratio = 5.0;
    double adapt_factor = 1.4;
    int stall_window = 800;
    double stall_pinf = 1e-3;
};

/// Warm-start state carried across cutting-plane iterations and down the
/// branch-and-bound tree. All values are stored unscaled; cut multipliers are
/// keyed by the stable cut ids managed by the caller.
struct SdpWarmStart {
    bool valid = false;
    double sigma = 0.0;
    Matrix x;       // primal estimate
    Matrix s_psd;   // dual slack estimate
    Matrix p_pos;   // nonnegativity multiplier estimate
    Vector y_rows;
    double y_trace = 0.0;
    std::map<std::pair<int, int>, double> u_cl;
    std::map<std::uint64_t, double> cut_xi;  // signed box multiplier per cut id
    std::map<std::uint64_t, double> cut_s;   // primal slack per cut id
};

namespace detail {

/// Sparse symmetric representation of one cut's coefficient matrix: entries
/// (r <= c, v), meaning B[r,c] = B[c,r] = v off the diagonal, B[r,r] = v on it.
struct SymEntries {
    std::vector<int> r, c;
    std::vector<double> v;

    void add(int rr, int cc, double vv) {
        r.push_back(std::min(rr, cc));
        c.push_back(std::max(rr, cc));
        v.push_back(vv);
    }
};

inline SymEntries cut_matrix_entries(const Cut& cut) {
    SymEntries e;
    switch (cut.kind) {
        case CutKind::Pair:
            e.add(cut.idx[0], cut.idx[1], 0.5);
            e.add(cut.idx[0], cut.idx[0], -1.0);
            break;
        case CutKind::Triangle:
            e.add(cut.idx[0], cut.idx[1], 0.5);
            e.add(cut.idx[0], cut.idx[2], 0.5);
            e.add(cut.idx[0], cut.idx[0], -1.0);
            e.add(cut.idx[1], cut.idx[2], -0.5);
            break;
        case CutKind::Clique:
            for (std::size_t a = 0; a < cut.idx.size(); ++a)
                for (std::size_t b = a + 1; b < cut.idx.size(); ++b) e.add(cut.idx[a], cut.idx[b], 0.5);
            break;
    }
    return e;
}

inline double sym_entries_apply(const SymEntries& e, const Matrix& x) {
    double s = 0.0;
    for (std::size_t t = 0; t < e.v.size(); ++t)
        s += e.v[t] * (e.r[t] == e.c[t] ? x(e.r[t], e.r[t]) : 2.0 * x(e.r[t], e.c[t]));
    return s;
}

inline void sym_entries_scatter(const SymEntries& e, double coeff, Matrix& into) {
    for (std::size_t t = 0; t < e.v.size(); ++t) {
        if (e.r[t] == e.c[t]) {
            into(e.r[t], e.r[t]) += coeff * e.v[t];
        } else {
            into(e.r[t], e.c[t]) += coeff * e.v[t];
            into(e.c[t], e.r[t]) += coeff * e.v[t];
        }
    }
}

/// Frobenius inner product of two sparse symmetric matrices.
inline double sym_entries_dot(const SymEntries& a, const SymEntries& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        for (std::size_t j = 0; j < b.v.size(); ++j)
            if (a.r[i] == b.r[j] && a.c[i] == b.c[j]) s += (a.r[i] == a.c[i] ? 1.0 : 2.0) * a.v[i] * b.v[j];
    return s;
}

/// The constraint system of one subproblem in operator form, plus the normal
/// equations of the multiplier step. Row order: m row sums, trace, cannot-link
/// pairs, cuts.
class ConstraintSystem {
public:
    ConstraintSystem(const ShrunkProblem& p)
        : m_(p.m()),
          n_cl_(static_cast<int>(p.cannot_link.size())),
          q_(static_cast<int>(p.cuts.cuts.size())),
          mult_(p.mult),
          cl_(p.cannot_link) {
        e_norm2_ = mult_.squaredNorm();
        cut_entries_.reserve(p.cuts.cuts.size());
        for (const Cut& c : p.cuts.cuts) cut_entries_.push_back(cut_matrix_entries(c));
        b_ = Vector::Zero(rows());
        b_.head(m_).setOnes();
        b_(m_) = static_cast<double>(p.k);
        // cannot-link right-hand sides are zero; cut rows couple to slacks.
        build_factorization();
    }

    int rows() const { return m_ + 1 + n_cl_ + q_; }
    int m() const { return m_; }
    int n_cl() const { return n_cl_; }
    int q() const { return q_; }
    const Vector& rhs() const { return b_; }
    double rhs_norm() const { return b_.norm(); }

    /// (A_eq(X), B(X) - s).
    Vector apply(const Matrix& x, const Vector& s) const {
        Vector out(rows());
        Vector row = x * mult_;
        out.head(m_) = row;
        out(m_) = mult_.dot(x.diagonal());
        for (int t = 0; t < n_cl_; ++t) out(m_ + 1 + t) = x(cl_[static_cast<std::size_t>(t)].first, cl_[static_cast<std::size_t>(t)].second);
        for (int c = 0; c < q_; ++c) out(m_ + 1 + n_cl_ + c) = sym_entries_apply(cut_entries_[static_cast<std::size_t>(c)], x) - s(c);
        return out;
    }

    /// X-part of the adjoint: sum_i y_i E_i + y_tr Diag(e) + CL + cut terms.
    Matrix adjoint(const Vector& y) const {
        Matrix out = (y.head(m_) * mult_.transpose() + mult_ * y.head(m_).transpose()) * 0.5;
        out.diagonal() += y(m_) * mult_;
        for (int t = 0; t < n_cl_; ++t) {
            auto [a, bpt] = cl_[static_cast<std::size_t>(t)];
            out(a, bpt) += 0.5 * y(m_ + 1 + t);
            out(bpt, a) += 0.5 * y(m_ + 1 + t);
        }
        for (int c = 0; c < q_; ++c) sym_entries_scatter(cut_entries_[static_cast<std::size_t>(c)], y(m_ + 1 + n_cl_ + c), out);
        return out;
    }

    /// Solves (A A^T) y = r. Closed form when only the equality block exists,
    /// sparse LDLT otherwise.
    Vector solve_normal(const Vector& r) const {
        if (closed_form_) {
            // Block system [(1/2)(|e|^2 I + e e^T), f; f^T, |e|^2] with f_i = e_i^2.
            Vector r1 = r.head(m_);
            double rho = r(m_);
            auto m1_inv = [&](const Vector& t) {
                return (2.0 / e_norm2_) * (t - (mult_.dot(t) / (2.0 * e_norm2_)) * mult_);
            };
            Vector f = mult_.array().square().matrix();
            Vector m1_r = m1_inv(r1);
            Vector m1_f = m1_inv(f);
            double schur = e_norm2_ - f.dot(m1_f);
            if (std::abs(schur) < 1e-14 * e_norm2_) schur = (schur >= 0 ? 1.0 : -1.0) * 1e-14 * e_norm2_;
            double t = (rho - f.dot(m1_r)) / schur;
            Vector y(rows());
            y.head(m_) = m1_r - t * m1_f;
            y(m_) = t;
            return y;
        }
        return ldlt_.solve(r);
    }

private:
    void build_factorization() {
        closed_form_ = (n_cl_ == 0 && q_ == 0 && m_ >= 2);
        if (closed_form_) return;

        using Triplet = Eigen::Triplet<double>;
        std::vector<Triplet> trips;
        int nrows = rows();
        trips.reserve(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_) + 64 * static_cast<std::size_t>(q_ + n_cl_ + 1));

        // Row-sum block: (1/2)(e_i e_j + delta_ij |e|^2).
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j)
                trips.emplace_back(i, j, 0.5 * (mult_(i) * mult_(j) + (i == j ? e_norm2_ : 0.0)));
        // Row-sum vs. trace and trace diagonal.
        for (int i = 0; i < m_; ++i) {
            double val = mult_(i) * mult_(i);
            trips.emplace_back(i, m_, val);
            trips.emplace_back(m_, i, val);
        }
        trips.emplace_back(m_, m_, e_norm2_);
        // Cannot-link rows.
        for (int t = 0; t < n_cl_; ++t) {
            int row = m_ + 1 + t;
            auto [a, bpt] = cl_[static_cast<std::size_t>(t)];
            trips.emplace_back(row, row, 0.5);
            double va = 0.5 * mult_(bpt);
            double vb = 0.5 * mult_(a);
            trips.emplace_back(row, a, va);
            trips.emplace_back(a, row, va);
            trips.emplace_back(row, bpt, vb);
            trips.emplace_back(bpt, row, vb);
        }
        // Cut rows.
        for (int c = 0; c < q_; ++c) {
            int row = m_ + 1 + n_cl_ + c;
            const SymEntries& ec = cut_entries_[static_cast<std::size_t>(c)];
            // vs row sums: (B e)_i — accumulate the sparse product.
            std::map<int, double> be;
            double diag_dot = 0.0;
            for (std::size_t t = 0; t < ec.v.size(); ++t) {
                if (ec.r[t] == ec.c[t]) {
                    be[ec.r[t]] += ec.v[t] * mult_(ec.r[t]);
                    diag_dot += ec.v[t] * mult_(ec.r[t]);
                } else {
                    be[ec.r[t]] += ec.v[t] * mult_(ec.c[t]);
                    be[ec.c[t]] += ec.v[t] * mult_(ec.r[t]);
                }
            }
            for (auto [i, val] : be) {
                trips.emplace_back(row, i, val);
                trips.emplace_back(i, row, val);
            }
            // vs trace: only diagonal entries of B contribute.
            if (diag_dot != 0.0) {
                trips.emplace_back(row, m_, diag_dot);
                trips.emplace_back(m_, row, diag_dot);
            }
            // vs cannot-link: the entry of B at that pair.
            for (int t = 0; t < n_cl_; ++t) {
                auto [a, bpt] = cl_[static_cast<std::size_t>(t)];
                for (std::size_t e = 0; e < ec.v.size(); ++e)
                    if (ec.r[e] == a && ec.c[e] == bpt) {
                        trips.emplace_back(row, m_ + 1 + t, ec.v[e]);
                        trips.emplace_back(m_ + 1 + t, row, ec.v[e]);
                    }
            }
            // vs other cuts (and the slack identity on the diagonal).
            for (int c2 = c; c2 < q_; ++c2) {
                double dot = sym_entries_dot(ec, cut_entries_[static_cast<std::size_t>(c2)]);
                if (c2 == c) dot += 1.0;
                if (dot != 0.0) {
                    int row2 = m_ + 1 + n_cl_ + c2;
                    trips.emplace_back(row, row2, dot);
                    if (c2 != c) trips.emplace_back(row2, row, dot);
                }
            }
        }
        // Tiny ridge for safety against exact linear dependence.
        for (int i = 0; i < nrows; ++i) trips.emplace_back(i, i, 1e-12 * (1.0 + e_norm2_));

        Eigen::SparseMatrix<double> normal(nrows, nrows);
        normal.setFromTriplets(trips.begin(), trips.end());
        ldlt_.compute(normal);
        if (ldlt_.info() != Eigen::Success) throw Error("normal-equation factorization failed");
    }

    int m_, n_cl_, q_;
    Vector mult_;
    std::vector<std::pair<int, int>> cl_;
    std::vector<SymEntries> cut_entries_;
    Vector b_;
    double e_norm2_ = 0.0;
    bool closed_form_ = false;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace detail

/// Solves the subproblem to medium precision with an augmented-Lagrangian
/// scheme alternating projections onto the affine constraints (a linear
/// solve), the semidefinite cone (eigendecomposition) and the nonnegative
/// orthant plus cut box (clamping), with over-relaxed multiplier updates.
/// The returned certificate — not the iteration — is the contract:
/// kkt_residual is max(relative primal feasibility, relative dual
/// feasibility, relative duality gap).
///
/// `cut_ids`, if given, must parallel p.cuts.cuts and supplies the stable ids
/// used to carry cut multipliers in `warm` across calls.
inline SdpSolution solve(const ShrunkProblem& p, double tol, const SolverOptions& opts = {},
                         SdpWarmStart* warm = nullptr, const std::vector<std::uint64_t>* cut_ids = nullptr) {
    const int m = p.m();
    if (m < p.k) throw InvalidK("shrunk dimension " + std::to_string(m) + " below k");
    for (auto [a, b] : p.cannot_link)
        if (a < 0 || b < 0 || a >= m || b >= m || a == b)
            throw IndexOutOfRange("cannot-link pair outside problem");

    const int q = static_cast<int>(p.cuts.cuts.size());
    detail::ConstraintSystem sys(p);

    // Objective scaling keeps the iteration scale-free; duals are unscaled on
    // exit.
    const double alpha = 1.0 / std::max(1.0, p.w_shrunk.norm());
    Matrix c_scaled = -alpha * p.w_shrunk;
    const double c_norm = c_scaled.norm();
    const double b_norm = sys.rhs_norm();

    // Lower bounds of the cut boxes (upper bounds are all zero for pair and
    // triangle cuts; cliques are lower-bounded).
    Vector rhs_lo(q), rhs_hi(q);
    for (int c = 0; c < q; ++c) {
        rhs_lo(c) = p.cuts.cuts[static_cast<std::size_t>(c)].rhs_lo;
        rhs_hi(c) = p.cuts.cuts[static_cast<std::size_t>(c)].rhs_hi;
    }

    double sigma = opts.sigma0;
    Matrix x = Matrix::Zero(m, m);
    Vector s = Vector::Zero(q);
    Matrix s_psd = Matrix::Zero(m, m);
    Matrix p_pos = Matrix::Zero(m, m);
    Vector y = Vector::Zero(sys.rows());
    Vector p_s = Vector::Zero(q);

    if (warm && warm->valid && warm->x.rows() == m) {
        x = warm->x;
        if (warm->s_psd.rows() == m) s_psd = alpha * warm->s_psd;
        if (warm->p_pos.rows() == m) p_pos = alpha * warm->p_pos;
        if (warm->y_rows.size() == m) y.head(m) = alpha * warm->y_rows;
        y(m) = alpha * warm->y_trace;
        for (int t = 0; t < sys.n_cl(); ++t) {
            auto it = warm->u_cl.find(p.cannot_link[static_cast<std::size_t>(t)]);
            if (it != warm->u_cl.end()) y(m + 1 + t) = alpha * it->second;
        }
        if (cut_ids) {
            for (int c = 0; c < q; ++c) {
                auto xi = warm->cut_xi.find((*cut_ids)[static_cast<std::size_t>(c)]);
                if (xi != warm->cut_xi.end()) {
                    p_s(c) = alpha * xi->second;
                    y(m + 1 + sys.n_cl() + c) = p_s(c);
                }
                auto sv = warm->cut_s.find((*cut_ids)[static_cast<std::size_t>(c)]);
                if (sv != warm->cut_s.end()) s(c) = sv->second;
            }
        }
        if (warm->sigma > 0.0) sigma = warm->sigma;
    }

    SdpSolution sol;
    double gamma = opts.over_relax;
    double best_pinf = std::numeric_limits<double>::infinity();
    int best_pinf_iter = 0;
    double min_eig_t = 0.0;

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        // Multiplier (y) block: normal-equation solve.
        Matrix mtmp = x / sigma + s_psd + p_pos - c_scaled;
        Vector vtmp = s / sigma + p_s;
        Vector rhs = sys.rhs() / sigma - sys.apply(mtmp, vtmp);
        y = sys.solve_normal(rhs);

        Matrix aty = sys.adjoint(y);
        Vector y_cut = y.tail(q);

        // Semidefinite block: project onto the cone.
        Matrix t_x = c_scaled - aty - p_pos - x / sigma;
        s_psd = detail::project_psd(t_x, &min_eig_t);

        // Orthant + box block: entrywise clamping and per-cut prox.
        Matrix g_x = c_scaled - aty - s_psd - x / sigma;
        p_pos = g_x.cwiseMax(0.0);
        for (int c = 0; c < q; ++c) {
            double g = y_cut(c) - s(c) / sigma;
            if (std::isfinite(rhs_hi(c)))
                p_s(c) = std::min(g + alpha * rhs_hi(c) / sigma, 0.0);
            else
                p_s(c) = std::max(g + alpha * rhs_lo(c) / sigma, 0.0);
        }

        // Over-relaxed multiplier update; the multiplier is the primal pair.
        Matrix r_x = aty + s_psd + p_pos - c_scaled;
        Vector r_s = p_s - y_cut;
        x.noalias() += (gamma * sigma) * r_x;
        s.noalias() += (gamma * sigma) * r_s;

        // Certificate quality.
        Vector prim = sys.apply(x, s) - sys.rhs();
        double pinf = prim.norm() / (1.0 + b_norm);
        double dinf = std::sqrt(r_x.squaredNorm() + r_s.squaredNorm()) / (1.0 + c_norm);
        double pobj = (c_scaled.cwiseProduct(x)).sum();
        double dobj = y.head(m).sum() + static_cast<double>(p.k) * y(m);
        for (int c = 0; c < q; ++c) {
            if (std::isfinite(rhs_hi(c)))
                dobj += alpha * rhs_hi(c) * std::min(p_s(c), 0.0);
            else
                dobj += alpha * rhs_lo(c) * std::max(p_s(c), 0.0);
        }
        double gap_rel = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.pinf = pinf;
        sol.dinf = dinf;
        sol.gap_rel = gap_rel;
        sol.kkt_residual = std::max({pinf, dinf, gap_rel});
        if (sol.kkt_residual <= tol) {
            sol.converged = true;
            ++it;
            break;
        }

        if (pinf < 0.9 * best_pinf) {
            best_pinf = pinf;
            best_pinf_iter = it;
        }
        if (it - best_pinf_iter > opts.stall_window && pinf > opts.stall_pinf && it > 2 * opts.stall_window) {
            sol.infeasible_suspected = true;
            ++it;
            break;
        }

        // Residual balancing: the iteration drives the dual equation to zero
        // at rate ~sigma and the primal one at rate ~1/sigma, so shrink sigma
        // when primal infeasibility lags and grow it in the opposite case.
        if ((it + 1) % opts.adapt_interval == 0) {
            double ratio = pinf / std::max(dinf, 1e-16);
            if (ratio > opts.adapt_ratio)
                sigma = std::max(sigma / opts.adapt_factor, 1e-6);
            else if (ratio < 1.0 / opts.adapt_ratio)
                sigma = std::min(sigma * opts.adapt_factor, 1e6);
        }
    }
    sol.iterations = it;

    // Unscale and package the certificate.
    sol.z = (x + x.transpose()) * 0.5;
    sol.obj_sdp = -(p.w_shrunk.cwiseProduct(sol.z)).sum();
    sol.y = y.head(m + 1) / alpha;
    sol.u = y.segment(m + 1, sys.n_cl()) / alpha;
    sol.v = Vector::Zero(q);
    sol.w = Vector::Zero(q);
    for (int c = 0; c < q; ++c) {
        double xi = p_s(c) / alpha;
        if (std::isfinite(rhs_hi(c)))
            sol.w(c) = std::max(-xi, 0.0);
        else
            sol.v(c) = std::max(xi, 0.0);
    }
    sol.p_nonneg = p_pos / alpha;
    sol.s_psd = s_psd / alpha;
    sol.cut_slack = s;
    sol.sigma_final = sigma;
    sol.min_entry_z = sol.z.size() > 0 ? sol.z.minCoeff() : 0.0;
    {
        detail::PartialEig neg = detail::sym_eig_below(sol.z, 0.0);
        sol.min_eig_z = neg.count > 0 ? neg.values[0] : 0.0;
    }

    if (warm) {
        warm->valid = true;
        warm->sigma = sigma;
        warm->x = sol.z;
        warm->s_psd = sol.s_psd;
        warm->p_pos = sol.p_nonneg;
        warm->y_rows = sol.y.head(m);
        warm->y_trace = sol.y(m);
        warm->u_cl.clear();
        for (int t = 0; t < sys.n_cl(); ++t) warm->u_cl[p.cannot_link[static_cast<std::size_t>(t)]] = sol.u(t);
        warm->cut_xi.clear();
        warm->cut_s.clear();
        if (cut_ids) {
            for (int c = 0; c < q; ++c) {
                warm->cut_xi[(*cut_ids)[static_cast<std::size_t>(c)]] = p_s(c) / alpha;
                warm->cut_s[(*cut_ids)[static_cast<std::size_t>(c)]] = s(c);
            }
        }
    }
    return sol;
}

}  // namespace mssc
