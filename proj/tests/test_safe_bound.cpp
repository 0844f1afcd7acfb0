#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mssc/dataset.hpp"
#include "mssc/rng.hpp"
#include "mssc/safe_bound.hpp"
#include "mssc/sdp.hpp"
#include "support.hpp"

namespace {

mssc::SdpSolution manual_solution(const mssc::ShrunkProblem& p, const mssc::Vector& y) {
    mssc::SdpSolution sol;
    sol.y = y;
    sol.u = mssc::Vector::Zero(static_cast<Eigen::Index>(p.cannot_link.size()));
    sol.v = mssc::Vector::Zero(static_cast<Eigen::Index>(p.cuts.cuts.size()));
    sol.w = mssc::Vector::Zero(static_cast<Eigen::Index>(p.cuts.cuts.size()));
    sol.p_nonneg = mssc::Matrix::Zero(p.m(), p.m());
    return sol;
}

}  // namespace

TEST_CASE("zero multipliers leave the negated objective matrix") {
    mssc::Rng rng(10);
    mssc::DataMatrix data = support::random_instance(5, 2, rng);
    mssc::GramMatrix g = mssc::gram(data);
    mssc::ShrunkProblem p = mssc::build_root(g, 2);
    mssc::Matrix s = mssc::assemble_dual_slack(p, mssc::Vector::Zero(6), mssc::Vector(), mssc::Vector(),
                                               mssc::Vector(), mssc::Matrix::Zero(5, 5));
    CHECK((s + g.w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("an exact two-point dual certificate yields a zero-loss bound") {
    // Two points at -1 and +1 on a line, k = 1: scatter 2, optimal duals
    // y_row = (1, 1), y_trace = -2 make the dual slack vanish identically.
    mssc::ShrunkProblem p;
    p.w_shrunk.resize(2, 2);
    p.w_shrunk << 1.0, -1.0, -1.0, 1.0;
    p.mult = mssc::Vector::Ones(2);
    p.k = 1;

    mssc::Vector y(3);
    y << 1.0, 1.0, -2.0;
    mssc::Matrix s = mssc::assemble_dual_slack(p, y, mssc::Vector(), mssc::Vector(), mssc::Vector(),
                                               mssc::Matrix::Zero(2, 2));
    CHECK(s.cwiseAbs().maxCoeff() == 0.0);
    CHECK(mssc::dual_objective(p, y, mssc::Vector(), mssc::Vector()) == 0.0);

    mssc::SafeBoundReport rep = mssc::safe_lower_bound(p, manual_solution(p, y), 2.0);
    CHECK(rep.correction == 0.0);
    CHECK(rep.lb_mssc < 2.0);          // the summation margin keeps it strict
    CHECK(rep.lb_mssc > 2.0 - 1e-10);  // but microscopically so
}

TEST_CASE("a negated identity slack costs exactly its eigenvalue mass") {
    mssc::ShrunkProblem p;
    p.w_shrunk = mssc::Matrix::Identity(2, 2);
    p.mult = mssc::Vector::Ones(2);
    p.k = 1;
    mssc::SafeBoundReport rep = mssc::safe_lower_bound(p, manual_solution(p, mssc::Vector::Zero(3)), 0.0);
    CHECK(rep.correction == Catch::Approx(-2.0).margin(1e-12));
    CHECK(rep.min_eig_s == Catch::Approx(-1.0).margin(1e-12));
    CHECK(rep.dual_value == 0.0);
    CHECK(rep.lb_sdp == Catch::Approx(-2.0).margin(1e-12));
}

TEST_CASE("the slack assembly is exactly linear in each multiplier") {
    mssc::Rng rng(41);
    mssc::DataMatrix data = support::random_instance(6, 2, rng);
    mssc::ShrunkProblem p = mssc::build_root(mssc::gram(data), 2);
    p.mult << 2, 1, 1, 3, 1, 1;  // exercise the multiplicity weighting
    p.cannot_link.push_back({1, 4});
    p.cuts.cuts.push_back(mssc::make_pair_cut(0, 2));
    p.cuts.cuts.push_back(mssc::make_clique_cut({1, 3, 5}, 10, 2));

    mssc::Vector y = mssc::Vector::Zero(7);
    mssc::Vector u = mssc::Vector::Zero(1);
    mssc::Vector v = mssc::Vector::Zero(2);
    mssc::Vector w = mssc::Vector::Zero(2);
    mssc::Matrix pn = mssc::Matrix::Zero(6, 6);
    mssc::Matrix base = mssc::assemble_dual_slack(p, y, u, v, w, pn);

    const double delta = 0.37;

    // Row multiplier i: subtracts delta * (e_i mult^T + mult e_i^T) / 2.
    mssc::Vector y2 = y;
    y2(3) += delta;
    mssc::Matrix ds = mssc::assemble_dual_slack(p, y2, u, v, w, pn) - base;
    mssc::Matrix expect = mssc::Matrix::Zero(6, 6);
    expect.row(3) -= 0.5 * delta * p.mult.transpose();
    expect.col(3) -= 0.5 * delta * p.mult;
    CHECK((ds - expect).cwiseAbs().maxCoeff() <= 1e-15);

    // Trace multiplier: subtracts delta * Diag(mult).
    mssc::Vector y3 = y;
    y3(6) += delta;
    ds = mssc::assemble_dual_slack(p, y3, u, v, w, pn) - base;
    expect.setZero();
    expect.diagonal() -= delta * p.mult;
    CHECK((ds - expect).cwiseAbs().maxCoeff() <= 1e-15);

    // Cannot-link multiplier: subtracts delta/2 on the symmetric pair.
    mssc::Vector u2 = u;
    u2(0) = delta;
    ds = mssc::assemble_dual_slack(p, y, u2, v, w, pn) - base;
    expect.setZero();
    expect(1, 4) = expect(4, 1) = -0.5 * delta;
    CHECK((ds - expect).cwiseAbs().maxCoeff() <= 1e-15);

    // Lower-bound cut multiplier v: subtracts delta times the cut
    // coefficients (clique off-diagonals carry weight 1/2 each).
    mssc::Vector v2 = v;
    v2(1) = delta;
    ds = mssc::assemble_dual_slack(p, y, u, v2, w, pn) - base;
    expect.setZero();
    for (int a : {1, 3, 5})
        for (int b : {1, 3, 5})
            if (a != b) expect(a, b) = -0.5 * delta;
    CHECK((ds - expect).cwiseAbs().maxCoeff() <= 1e-15);

    // Upper-bound cut multiplier w on a pair cut: adds the coefficients of
    // z_ij - z_ii, i.e. subtracts on the diagonal, adds on the pair.
    mssc::Vector w2 = w;
    w2(0) = delta;
    ds = mssc::assemble_dual_slack(p, y, u, v, w2, pn) - base;
    expect.setZero();
    expect(0, 0) = -delta;
    expect(0, 2) = expect(2, 0) = 0.5 * delta;
    CHECK((ds - expect).cwiseAbs().maxCoeff() <= 1e-15);

    // Nonnegativity multiplier: entrywise subtraction, symmetrized.
    mssc::Matrix pn2 = pn;
    pn2(2, 5) = delta;
    ds = mssc::assemble_dual_slack(p, y, u, v, w, pn2) - base;
    expect.setZero();
    expect(2, 5) = expect(5, 2) = -0.5 * delta;
    CHECK((ds - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("clearly negative sign-constrained multipliers are rejected") {
    mssc::Rng rng(42);
    mssc::DataMatrix data = support::random_instance(4, 2, rng);
    mssc::ShrunkProblem p = mssc::build_root(mssc::gram(data), 2);
    p.cuts.cuts.push_back(mssc::make_pair_cut(0, 1));
    mssc::Vector y = mssc::Vector::Zero(5);
    mssc::Vector u, v1(1), w1(1);
    v1 << -1.0;
    w1 << 0.0;
    mssc::Matrix pn = mssc::Matrix::Zero(4, 4);
    CHECK_THROWS_AS(mssc::assemble_dual_slack(p, y, u, v1, w1, pn), mssc::NegativeMultiplier);

    v1 << -1e-10;  // numeric dust is clipped, not rejected
    CHECK_NOTHROW(mssc::assemble_dual_slack(p, y, u, v1, w1, pn));

    mssc::Matrix pn_bad = pn;
    pn_bad(1, 2) = -0.5;
    CHECK_THROWS_AS(mssc::assemble_dual_slack(p, y, u, mssc::Vector::Zero(1), w1, pn_bad),
                    mssc::NegativeMultiplier);
}

TEST_CASE("shape mismatches are diagnosed") {
    mssc::Rng rng(43);
    mssc::DataMatrix data = support::random_instance(4, 2, rng);
    mssc::ShrunkProblem p = mssc::build_root(mssc::gram(data), 2);
    mssc::Matrix pn = mssc::Matrix::Zero(4, 4);
    CHECK_THROWS_AS(mssc::assemble_dual_slack(p, mssc::Vector::Zero(4), {}, {}, {}, pn),
                    mssc::DimensionMismatch);
    CHECK_THROWS_AS(mssc::assemble_dual_slack(p, mssc::Vector::Zero(5), mssc::Vector::Zero(2), {}, {}, pn),
                    mssc::DimensionMismatch);
    CHECK_THROWS_AS(mssc::assemble_dual_slack(p, mssc::Vector::Zero(5), {}, mssc::Vector::Zero(1), {}, pn),
                    mssc::DimensionMismatch);
    CHECK_THROWS_AS(
        mssc::assemble_dual_slack(p, mssc::Vector::Zero(5), {}, {}, {}, mssc::Matrix::Zero(3, 3)),
        mssc::DimensionMismatch);
}

TEST_CASE("dual_objective prices finite bounds only") {
    mssc::Rng rng(44);
    mssc::DataMatrix data = support::random_instance(6, 2, rng);
    mssc::ShrunkProblem p = mssc::build_root(mssc::gram(data), 2);
    p.cuts.cuts.push_back(mssc::make_pair_cut(0, 1));            // rhs_hi = 0
    p.cuts.cuts.push_back(mssc::make_clique_cut({0, 1, 2}, 6, 2));  // rhs_lo = 1/5

    mssc::Vector y(7);
    y << 0.5, -0.25, 1.0, 0.0, 2.0, -1.0, 3.0;
    mssc::Vector v(2), w(2);
    v << 0.0, 4.0;  // clique lower bound priced at 4 * (1/5)
    w << 7.0, 0.0;  // pair upper bound rhs is 0, contributes nothing
    double got = mssc::dual_objective(p, y, v, w);
    double want = (0.5 - 0.25 + 1.0 + 0.0 + 2.0 - 1.0) + 2.0 * 3.0 + 4.0 * 0.2;
    CHECK(got == Catch::Approx(want).margin(1e-14));
}

TEST_CASE("the bound is safe against brute force on random instances") {
    mssc::Rng rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 6 + static_cast<int>(rng.below(3));
        int k = 2 + static_cast<int>(rng.below(2));
        mssc::DataMatrix data = support::random_instance(n, 2, rng);
        mssc::DataMatrix centered = data;
        centered.points.rowwise() -= data.points.colwise().mean().eval();
        mssc::GramMatrix g = mssc::gram(centered);
        mssc::ShrunkProblem p = mssc::build_root(g, k);

        mssc::SdpSolution sol = mssc::solve(p, 1e-6);
        auto [opt, labels] = support::brute_force_mssc(data, k);

        mssc::SafeBoundReport rep = mssc::safe_lower_bound(p, sol, g.trace_w);
        CHECK(rep.lb_mssc <= opt + 1e-9 * (1.0 + std::abs(opt)));

        // Strengthen with cuts and re-check safety.
        mssc::CutPool pool;
        mssc::Rng sep(900 + trial);
        for (auto& c : mssc::separate_pairs_triangles(sol.z, pool, 100000, 0.2, sep)) p.cuts.cuts.push_back(c);
        for (auto& c : mssc::separate_cliques(sol.z, k, n, pool)) p.cuts.cuts.push_back(c);
        mssc::SdpSolution sol2 = mssc::solve(p, 1e-6);
        mssc::SafeBoundReport rep2 = mssc::safe_lower_bound(p, sol2, g.trace_w);
        CHECK(rep2.lb_mssc <= opt + 1e-9 * (1.0 + std::abs(opt)));

        // Discarding cut multipliers yields another (weaker but still valid)
        // certificate.
        mssc::SdpSolution stripped = sol2;
        stripped.v.setZero();
        stripped.w.setZero();
        mssc::SafeBoundReport rep3 = mssc::safe_lower_bound(p, stripped, g.trace_w);
        CHECK(rep3.lb_mssc <= opt + 1e-9 * (1.0 + std::abs(opt)));
    }
}

TEST_CASE("the iris root certificate lands in the published band") {
    mssc::DataMatrix raw = mssc::load_csv(std::string(MSSC_DATA_DIR) + "/iris.csv");
    mssc::DataMatrix centered = raw;
    centered.points.rowwise() -= raw.points.colwise().mean().eval();
    mssc::GramMatrix g = mssc::gram(centered);
    mssc::ShrunkProblem p = mssc::build_root(g, 3);
    mssc::SdpSolution sol = mssc::solve(p, 1e-5);
    REQUIRE(sol.converged);
    mssc::SafeBoundReport rep = mssc::safe_lower_bound(p, sol, g.trace_w);
    const double f_opt = 78.851441426146;
    CHECK(rep.lb_mssc <= f_opt);
    CHECK(rep.lb_mssc >= f_opt * (1.0 - 4.5e-2));  // root gap is about 4.2%
}
