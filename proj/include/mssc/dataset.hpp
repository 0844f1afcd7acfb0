#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mssc/common.hpp"
#include "mssc/rng.hpp"

namespace mssc {

/// The n x d point matrix; rows are data points.
struct DataMatrix {
    Matrix points;

    int n() const { return static_cast<int>(points.rows()); }
    int d() const { return static_cast<int>(points.cols()); }
};

/// Gram matrix W = P P^T of a data matrix, with its trace cached.
/// trace_w is the constant offset between the SDP objective <-W, Z> and the
/// clustering objective: mssc(a) = trace_w - <W, Z(a)>.
struct GramMatrix {
    Matrix w;
    double trace_w = 0.0;
};

/// Cluster assignment with 1-based ids in {1..k}; every id must be used.
struct Assignment {
    std::vector<int> labels;
    int k = 0;
};

/// Parameters of the synthetic Gaussian-mixture generator.
struct SyntheticSpec {
    int n = 0;
    int k = 0;
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

/// Reads a headerless comma-separated numeric file; rows are points.
inline DataMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string field;
        int col_no = 0;
        while (std::getline(ls, field, ',')) {
            ++col_no;
            try {
                std::size_t used = 0;
                double v = std::stod(field, &used);
                // Trailing garbage after the number is a parse error too.
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
                if (used != field.size()) throw std::invalid_argument(field);
                if (!std::isfinite(v)) throw std::invalid_argument(field);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParseError("non-numeric field '" + field + "' in " + path, row_no, col_no);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged row: expected " + std::to_string(rows.front().size()) +
                                 " fields, got " + std::to_string(row.size()),
                             row_no, static_cast<int>(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyInput("no data rows in " + path);

    DataMatrix data;
    data.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            data.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return data;
}

/// Writes a data matrix in the same headerless CSV convention load_csv reads.
inline void write_csv(const DataMatrix& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.precision(17);
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.d(); ++j) {
            if (j) out << ',';
            out << data.points(i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

/// W_ij = p_i . p_j, symmetrized exactly; trace_w = sum_i |p_i|^2.
inline GramMatrix gram(const DataMatrix& data) {
    GramMatrix g;
    g.w.noalias() = data.points * data.points.transpose();
    // Enforce bit-exact symmetry regardless of the BLAS kernel's summation order.
    g.w = ((g.w + g.w.transpose()) * 0.5).eval();
    g.trace_w = g.w.trace();
    return g;
}

/// Validates label range and the no-empty-cluster rule; returns cluster sizes.
inline std::vector<int> cluster_sizes(const Assignment& a) {
    std::vector<int> sizes(static_cast<std::size_t>(a.k), 0);
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        int lab = a.labels[i];
        if (lab < 1 || lab > a.k)
            throw IndexOutOfRange("label " + std::to_string(lab) + " outside {1.." +
                                  std::to_string(a.k) + "} at point " + std::to_string(i + 1));
        ++sizes[static_cast<std::size_t>(lab - 1)];
    }
    for (int j = 0; j < a.k; ++j)
        if (sizes[static_cast<std::size_t>(j)] == 0)
            throw EmptyCluster("cluster " + std::to_string(j + 1) + " is empty");
    return sizes;
}

/// Sum over clusters of within-cluster squared distances to the centroid.
/// Summation order is fixed (centroids per cluster in id order, then one pass
/// over points in index order) so equal assignments give bit-equal values.
inline double mssc_objective(const DataMatrix& data, const Assignment& a) {
    if (static_cast<int>(a.labels.size()) != data.n())
        throw DimensionMismatch("assignment length " + std::to_string(a.labels.size()) +
                                " != point count " + std::to_string(data.n()));
    std::vector<int> sizes = cluster_sizes(a);

    Matrix centroids = Matrix::Zero(a.k, data.d());
    for (int i = 0; i < data.n(); ++i)
        centroids.row(a.labels[static_cast<std::size_t>(i)] - 1) += data.points.row(i);
    for (int j = 0; j < a.k; ++j) centroids.row(j) /= static_cast<double>(sizes[static_cast<std::size_t>(j)]);

    double total = 0.0;
    for (int i = 0; i < data.n(); ++i)
        total += (data.points.row(i) - centroids.row(a.labels[static_cast<std::size_t>(i)] - 1)).squaredNorm();
    return total;
}

/// The clustering matrix Z(a) = sum_j (1/|C_j|) 1_{C_j} 1_{C_j}^T: the
/// feasible integral points of the semidefinite relaxation.
inline Matrix clustering_matrix(const Assignment& a) {
    std::vector<int> sizes = cluster_sizes(a);
    int n = static_cast<int>(a.labels.size());
    Matrix z = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (a.labels[static_cast<std::size_t>(i)] == a.labels[static_cast<std::size_t>(j)])
                z(i, j) = 1.0 / static_cast<double>(sizes[static_cast<std::size_t>(a.labels[static_cast<std::size_t>(i)] - 1)]);
    return z;
}

/// Samples n points in the plane from a mixture of k isotropic Gaussians.
/// Centers are uniform in [-(n/1000 + k), n/1000 + k] per coordinate; the n
/// points are split evenly over the k components (floor(n/k) each, remainder
/// round-robin to the first components), drawn component by component.
/// Deterministic for a fixed seed.
inline DataMatrix generate_gaussian(const SyntheticSpec& spec) {
    if (spec.n < 1 || spec.k < 1 || spec.k > spec.n)
        throw InvalidK("need n >= k >= 1, got n=" + std::to_string(spec.n) + " k=" + std::to_string(spec.k));
    if (!(spec.sigma > 0.0)) throw Error("sigma must be positive");

    const int d = 2;
    Rng rng(spec.seed);
    double half_width = static_cast<double>(spec.n) / 1000.0 + static_cast<double>(spec.k);

    Matrix centers(spec.k, d);
    for (int j = 0; j < spec.k; ++j)
        for (int c = 0; c < d; ++c) centers(j, c) = rng.uniform(-half_width, half_width);

    DataMatrix data;
    data.points.resize(spec.n, d);
    int row = 0;
    for (int j = 0; j < spec.k; ++j) {
        int count = spec.n / spec.k + (j < spec.n % spec.k ? 1 : 0);
        for (int t = 0; t < count; ++t, ++row)
            for (int c = 0; c < d; ++c) data.points(row, c) = centers(j, c) + spec.sigma * rng.normal();
    }
    return data;
}

/// Instance naming convention "{n}_{k}_{sigma}", e.g. "2000_10_0.5".
inline std::string synthetic_name(const SyntheticSpec& spec) {
    std::ostringstream name;
    name << spec.n << '_' << spec.k << '_' << spec.sigma;
    return name.str();
}

}  // namespace mssc
