#pragma once

#include <cmath>
#include <limits>

#include "mssc/common.hpp"
#include "mssc/detail/eig.hpp"
#include "mssc/sdp.hpp"

namespace mssc {

/// Rigorous lower-bound certificate built from approximate duals.
///   dual_value: value of the Lagrangian dual at the (cleaned) multipliers;
///   correction: sum of negative dual-slack eigenvalues, each widened by its
///               eigenpair residual, so lb_sdp = dual_value + correction is a
///               valid bound on the relaxation objective for any feasible Z;
///   lb_mssc:    trace_w + lb_sdp minus a floating-point summation margin —
///               the bound actually used for pruning;
///   min_eig_s:  smallest computed eigenvalue of the dual slack matrix.
struct SafeBoundReport {
    double dual_value = 0.0;
    double correction = 0.0;
    double lb_sdp = -std::numeric_limits<double>::infinity();
    double lb_mssc = -std::numeric_limits<double>::infinity();
    double min_eig_s = 0.0;
};

/// Builds the dual slack matrix
///   S = -W - sum_i y_i E_i - y_tr Diag(e) - A_cl^T(u) - B^T(v) + B^T(w) - P
/// from multipliers that need not satisfy complementarity or feasibility
/// exactly. Sign conditions required for validity of the bound (v, w, P >= 0)
/// are enforced by clipping; entries below -1e-9 indicate a caller bug and
/// throw NegativeMultiplier.
inline Matrix assemble_dual_slack(const ShrunkProblem& p, const Vector& y, const Vector& u, const Vector& v,
                                  const Vector& w, const Matrix& p_nonneg) {
    const int m = p.m();
    const int q = static_cast<int>(p.cuts.cuts.size());
    if (y.size() != m + 1) throw DimensionMismatch("assemble_dual_slack: y must have m+1 entries");
    if (u.size() != static_cast<Eigen::Index>(p.cannot_link.size()))
        throw DimensionMismatch("assemble_dual_slack: u size mismatch");
    if (v.size() != q || w.size() != q) throw DimensionMismatch("assemble_dual_slack: v/w size mismatch");
    if (p_nonneg.rows() != m || p_nonneg.cols() != m)
        throw DimensionMismatch("assemble_dual_slack: p_nonneg size mismatch");

    auto checked_pos = [](double x, const char* what) {
        if (x < -1e-9) throw NegativeMultiplier(std::string(what) + " multiplier is negative");
        return std::max(x, 0.0);
    };

    Matrix s = -p.w_shrunk;
    s.noalias() -= (y.head(m) * p.mult.transpose() + p.mult * y.head(m).transpose()) * 0.5;
    s.diagonal() -= y(m) * p.mult;
    for (std::size_t t = 0; t < p.cannot_link.size(); ++t) {
        auto [a, b] = p.cannot_link[t];
        s(a, b) -= 0.5 * u(static_cast<Eigen::Index>(t));
        s(b, a) -= 0.5 * u(static_cast<Eigen::Index>(t));
    }
    for (int c = 0; c < q; ++c) {
        double coeff = -checked_pos(v(c), "cut lower-bound") + checked_pos(w(c), "cut upper-bound");
        if (coeff != 0.0) detail::sym_entries_scatter(detail::cut_matrix_entries(p.cuts.cuts[static_cast<std::size_t>(c)]), coeff, s);
    }
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) s(r, c) -= checked_pos(p_nonneg(r, c), "nonnegativity");
    return ((s + s.transpose()) * 0.5).eval();
}

/// Value of the Lagrangian dual at the (clipped) multipliers:
///   sum_i y_i + k y_tr + sum_cuts (rhs_lo v - rhs_hi w).
inline double dual_objective(const ShrunkProblem& p, const Vector& y, const Vector& v, const Vector& w) {
    const int m = p.m();
    double val = y.head(m).sum() + static_cast<double>(p.k) * y(m);
    for (int c = 0; c < static_cast<int>(p.cuts.cuts.size()); ++c) {
        const Cut& cut = p.cuts.cuts[static_cast<std::size_t>(c)];
        if (std::isfinite(cut.rhs_lo)) val += cut.rhs_lo * std::max(v(c), 0.0);
        if (std::isfinite(cut.rhs_hi)) val -= cut.rhs_hi * std::max(w(c), 0.0);
    }
    return val;
}

/// Turns the subproblem solve into a bound that holds for every clustering
/// consistent with the node, independent of how inexact the solve was.
///
/// The chain: for any feasible Z, objective >= dual_value + <S, Z>, and
/// since 0 <= q^T Z q <= lambda_max(Z) <= 1 for every unit q (row sums are one
/// and multiplicities are >= 1), <S, Z> >= sum of negative eigenvalues of S.
/// Computed eigenvalues are widened by their residual ||S q - lambda q|| so an
/// inexact eigensolve cannot overshoot, and a final margin covers the
/// floating-point accumulation of the assembled quantities.
inline SafeBoundReport safe_lower_bound(const ShrunkProblem& p, const SdpSolution& sol, double trace_w) {
    SafeBoundReport rep;
    Matrix s = assemble_dual_slack(p, sol.y, sol.u, sol.v, sol.w, sol.p_nonneg.cwiseMax(0.0));
    rep.dual_value = dual_objective(p, sol.y, sol.v, sol.w);

    detail::SymEig eig = detail::sym_eig(s);
    const int m = p.m();
    Matrix resid = s * eig.vectors - eig.vectors * eig.values.asDiagonal();
    double abs_eig_sum = 0.0;
    rep.min_eig_s = m > 0 ? eig.values(0) : 0.0;
    for (int i = 0; i < m; ++i) {
        double widened = eig.values(i) - resid.col(i).norm();
        if (widened < 0.0) rep.correction += widened;
        abs_eig_sum += std::abs(eig.values(i));
    }

    rep.lb_sdp = rep.dual_value + rep.correction;
    double margin = 64.0 * std::numeric_limits<double>::epsilon() *
                    (std::abs(trace_w) + std::abs(rep.dual_value) + abs_eig_sum + 1.0);
    rep.lb_mssc = trace_w + rep.lb_sdp - margin;
    return rep;
}

}  // namespace mssc
