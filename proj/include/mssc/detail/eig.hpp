#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mssc/common.hpp"

#if defined(MSSC_USE_LAPACKE)
#include <lapacke.h>
#endif

namespace mssc::detail {

/// Full symmetric eigendecomposition A = Q diag(values) Q^T with eigenvalues
/// in ascending order. Uses LAPACK dsyevd when available, Eigen otherwise.
struct SymEig {
    Vector values;
    Matrix vectors;  // column i pairs with values[i]
};

inline SymEig sym_eig(const Matrix& a) {
    SymEig out;
    const int m = static_cast<int>(a.rows());
    if (a.cols() != m) throw DimensionMismatch("sym_eig: matrix not square");
    if (m == 0) return out;
#if defined(MSSC_USE_LAPACKE)
    out.vectors = a;
    out.values.resize(m);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', m, out.vectors.data(), m, out.values.data());
    if (info == 0) return out;
    // Fall through to Eigen on LAPACK failure (rare ill-conditioned cases).
#endif
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

/// Eigenpairs with eigenvalues strictly below `upper`, ascending. Cheaper
/// than a full decomposition when only one side of the spectrum is needed.
struct PartialEig {
    Vector values;
    Matrix vectors;
    int count = 0;
};

inline PartialEig sym_eig_below(const Matrix& a, double upper) {
    PartialEig out;
    const int m = static_cast<int>(a.rows());
    if (a.cols() != m) throw DimensionMismatch("sym_eig_below: matrix not square");
    if (m == 0) return out;
#if defined(MSSC_USE_LAPACKE)
    {
        Matrix work = a;
        Vector vals(m);
        Matrix vecs(m, m);
        std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * m));
        lapack_int found = 0;
        lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', m, work.data(), m,
                                         -1.0e300, upper, 0, 0, 0.0, &found, vals.data(), vecs.data(), m,
                                         isuppz.data());
        if (info == 0) {
            out.count = static_cast<int>(found);
            out.values = vals.head(found);
            out.vectors = vecs.leftCols(found);
            return out;
        }
    }
#endif
    SymEig full = sym_eig(a);
    int count = 0;
    while (count < m && full.values[count] < upper) ++count;
    out.count = count;
    out.values = full.values.head(count);
    out.vectors = full.vectors.leftCols(count);
    return out;
}

/// Projection of a symmetric matrix onto the positive semidefinite cone.
/// Reconstructs through the smaller spectral side: psd(A) = A - sum of the
/// negative eigenpairs, computed with a one-sided solve when possible.
inline Matrix project_psd(const Matrix& a, double* min_eig = nullptr) {
    const int m = static_cast<int>(a.rows());
    if (m == 0) return a;
    PartialEig neg = sym_eig_below(a, 0.0);
    if (min_eig) *min_eig = neg.count > 0 ? neg.values[0] : 0.0;
    if (neg.count == 0) return a;
    Matrix scaled = neg.vectors;
    for (int c = 0; c < neg.count; ++c) scaled.col(c) *= neg.values[c];
    Matrix out = a;
    out.noalias() -= scaled * neg.vectors.transpose();
    // The subtraction can leave last-bit asymmetry; re-symmetrize.
    out = ((out + out.transpose()) * 0.5).eval();
    return out;
}

}  // namespace mssc::detail
