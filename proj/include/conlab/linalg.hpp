#pragma once

// Dense symmetric linear algebra on Eigen types. Every routine accepts any
// Eigen expression and works in the expression's scalar type.

#include "conlab/error.hpp"
#include "conlab/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace conlab {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double default_tol_zero = 1e-9;

/// Checks finiteness and symmetry (max asymmetry <= 1e-12 * max|entry|) and
/// returns (M + M^T) / 2.
template <typename Derived>
[[nodiscard]] Matrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::NotSymmetric,
                    "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    Matrix<Scalar> a = m;
    if (!a.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    if (a.size() == 0) return a;
    const Scalar scale = a.cwiseAbs().maxCoeff();
    const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-12) * scale) {
        throw Error(ErrorCode::NotSymmetric, "max asymmetry " + std::to_string(static_cast<double>(asym)));
    }
    return (a + a.transpose()) / Scalar(2);
}

template <typename Scalar>
struct SymmetricEigen {
    Vector<Scalar> values;   // ascending
    Matrix<Scalar> vectors;  // column i pairs with values(i)
};

/// Cyclic Jacobi sweeps until the off-diagonal mass is at rounding level.
template <typename Derived>
[[nodiscard]] SymmetricEigen<typename Derived::Scalar> eigen_symmetric(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> a = symmetrized(m);
    const Eigen::Index k = a.rows();
    Matrix<Scalar> v = Matrix<Scalar>::Identity(k, k);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();

    for (int sweep = 0; sweep < 100; ++sweep) {
        const Scalar off = a.template triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
        if (off <= Scalar(0.01) * eps * a.norm() || off == Scalar(0)) break;
        for (Eigen::Index p = 0; p < k; ++p) {
            for (Eigen::Index q = p + 1; q < k; ++q) {
                if (a(p, q) == Scalar(0)) continue;
                Eigen::JacobiRotation<Scalar> rot;
                rot.makeJacobi(a, p, q);
                a.applyOnTheLeft(p, q, rot.adjoint());
                a.applyOnTheRight(p, q, rot);
                a(p, q) = a(q, p) = Scalar(0);
                v.applyOnTheRight(p, q, rot);
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    SymmetricEigen<Scalar> out{Vector<Scalar>(k), Matrix<Scalar>(k, k)};
    for (Eigen::Index i = 0; i < k; ++i) {
        out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    if (!out.values.allFinite()) throw Error(ErrorCode::NonFinite, "eigenvalues not finite");
    return out;
}

struct Inertia {
    int plus = 0;
    int minus = 0;
    int zero = 0;

    friend bool operator==(const Inertia&, const Inertia&) = default;
    Inertia& operator+=(const Inertia& o) {
        plus += o.plus;
        minus += o.minus;
        zero += o.zero;
        return *this;
    }
    friend Inertia operator+(Inertia a, const Inertia& b) { return a += b; }
};

/// Zero threshold shared by every spectral decision: tol_rel * max(1, max|lambda|).
template <typename VectorType>
[[nodiscard]] typename VectorType::Scalar zero_threshold(const Eigen::MatrixBase<VectorType>& values,
                                                         double tol_rel = default_tol_zero) {
    using Scalar = typename VectorType::Scalar;
    const Scalar top = values.size() == 0 ? Scalar(0) : values.cwiseAbs().maxCoeff();
    return Scalar(tol_rel) * std::max(Scalar(1), top);
}

template <typename VectorType>
[[nodiscard]] Inertia inertia_of_values(const Eigen::MatrixBase<VectorType>& values, double tol_rel = default_tol_zero) {
    const auto threshold = zero_threshold(values, tol_rel);
    Inertia in;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::abs(values(i)) <= threshold) ++in.zero;
        else if (values(i) > 0) ++in.plus;
        else ++in.minus;
    }
    return in;
}

template <typename Derived>
[[nodiscard]] Inertia inertia(const Eigen::MatrixBase<Derived>& m, double tol_rel = default_tol_zero) {
    return inertia_of_values(eigen_symmetric(m).values, tol_rel);
}

/// Sum of 1/lambda_i v_i v_i^T over the eigenvalues above the zero threshold.
template <typename Derived>
[[nodiscard]] Matrix<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& m,
                                                             double tol_rel = default_tol_zero) {
    using Scalar = typename Derived::Scalar;
    const auto eig = eigen_symmetric(m);
    const Scalar threshold = zero_threshold(eig.values, tol_rel);
    Vector<Scalar> inv = Vector<Scalar>::Zero(eig.values.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        if (std::abs(eig.values(i)) > threshold) inv(i) = Scalar(1) / eig.values(i);
    }
    return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

/// Rows and columns `keep` of a square matrix.
template <typename Derived>
[[nodiscard]] Matrix<typename Derived::Scalar> principal_block(const Eigen::MatrixBase<Derived>& m,
                                                               const std::vector<int>& rows,
                                                               const std::vector<int>& cols) {
    Matrix<typename Derived::Scalar> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    return out;
}

/// Complement of `eliminated` in 0..k-1, ascending.
[[nodiscard]] inline std::vector<int> complement_indices(int k, const std::vector<int>& eliminated) {
    std::vector<char> drop(static_cast<std::size_t>(k), 0);
    for (int i : eliminated) {
        if (i < 0 || i >= k) throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(i));
        drop[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<int> keep;
    for (int i = 0; i < k; ++i)
        if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
    return keep;
}

/// M/N = M_CC - M_CN M_NN^{-1} M_NC where C is the complement of N; rows of
/// the result follow ascending order of C. M_NN is inverted spectrally and
/// must have condition number <= 1e12.
template <typename Derived>
[[nodiscard]] Matrix<typename Derived::Scalar> schur_complement(const Eigen::MatrixBase<Derived>& m,
                                                                const std::vector<int>& eliminated) {
    using Scalar = typename Derived::Scalar;
    const Matrix<Scalar> a = symmetrized(m);
    const std::vector<int> keep = complement_indices(static_cast<int>(a.rows()), eliminated);
    if (eliminated.empty()) return a;
    const Matrix<Scalar> nn = principal_block(a, eliminated, eliminated);
    const auto eig = eigen_symmetric(nn);
    const Scalar largest = eig.values.cwiseAbs().maxCoeff();
    const Scalar smallest = eig.values.cwiseAbs().minCoeff();
    if (smallest == Scalar(0) || largest / smallest > Scalar(1e12)) {
        throw Error(ErrorCode::SingularPrincipalBlock,
                    "condition number " + std::to_string(static_cast<double>(smallest == Scalar(0) ? 0 : largest / smallest)));
    }
    const Matrix<Scalar> nn_inv = eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();
    const Matrix<Scalar> cn = principal_block(a, keep, eliminated);
    Matrix<Scalar> out = principal_block(a, keep, keep) - cn * nn_inv * cn.transpose();
    return (out + out.transpose()) / Scalar(2);
}

/// Connected components of the graph whose edges are the off-diagonal entries
/// with |M_ij| > tol_rel * max|M|.
template <typename Derived>
[[nodiscard]] std::vector<int> matrix_components(const Eigen::MatrixBase<Derived>& m, double tol_rel = 1e-12) {
    using Scalar = typename Derived::Scalar;
    const auto k = static_cast<int>(m.rows());
    const Scalar scale = k == 0 ? Scalar(0) : m.cwiseAbs().maxCoeff();
    std::vector<int> label(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int s = 0; s < k; ++s) {
        if (label[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> stack{s};
        label[static_cast<std::size_t>(s)] = next;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < k; ++j) {
                if (j == i || label[static_cast<std::size_t>(j)] >= 0) continue;
                if (std::abs(m(i, j)) > Scalar(tol_rel) * scale) {
                    label[static_cast<std::size_t>(j)] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    return label;
}

template <typename Scalar = double>
struct WeightedLaplacian {
    Graph graph;
    Vector<Scalar> weights;
    Matrix<Scalar> matrix;
    std::vector<int> components;  // labels over positive-weight edges
    int component_count = 0;
};

/// L = d diag(w) d^T. Zero-weight edges do not join components.
template <typename Derived>
[[nodiscard]] WeightedLaplacian<typename Derived::Scalar> laplacian_from_weights(const Graph& g,
                                                                                 const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    if (w.size() != g.edge_count()) {
        throw Error(ErrorCode::InvalidArgument, "weight vector length " + std::to_string(w.size()) +
                                                    " != edge count " + std::to_string(g.edge_count()));
    }
    WeightedLaplacian<Scalar> out;
    out.graph = g;
    out.weights = w;
    out.matrix = Matrix<Scalar>::Zero(g.node_count(), g.node_count());
    std::vector<int> parent(static_cast<std::size_t>(g.node_count()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (int e = 0; e < g.edge_count(); ++e) {
        const Scalar we = w(e);
        if (!std::isfinite(static_cast<double>(we))) throw Error(ErrorCode::NonFinite, "edge weight");
        if (we < Scalar(0)) throw Error(ErrorCode::NegativeWeight, "edge " + std::to_string(e));
        const auto [u, v] = g.edge(e);
        out.matrix(u, u) += we;
        out.matrix(v, v) += we;
        out.matrix(u, v) -= we;
        out.matrix(v, u) -= we;
        if (we > Scalar(0)) parent[static_cast<std::size_t>(find(u))] = find(v);
    }
    out.components.assign(static_cast<std::size_t>(g.node_count()), -1);
    std::vector<int> root_label(static_cast<std::size_t>(g.node_count()), -1);
    for (int i = 0; i < g.node_count(); ++i) {
        const auto r = static_cast<std::size_t>(find(i));
        if (root_label[r] < 0) root_label[r] = out.component_count++;
        out.components[static_cast<std::size_t>(i)] = root_label[r];
    }
    return out;
}

template <typename Scalar>
[[nodiscard]] Scalar infinity() {
    return std::numeric_limits<Scalar>::infinity();
}

/// All-pairs effective resistance from a Laplacian-like matrix; +inf between
/// different components (components read off the off-diagonal pattern).
template <typename Derived>
[[nodiscard]] Matrix<typename Derived::Scalar> resistance_matrix(const Eigen::MatrixBase<Derived>& laplacian,
                                                                 double tol_rel = default_tol_zero) {
    using Scalar = typename Derived::Scalar;
    const Matrix<Scalar> pinv = pseudoinverse(laplacian, tol_rel);
    const std::vector<int> comp = matrix_components(laplacian);
    const Eigen::Index k = pinv.rows();
    Matrix<Scalar> r(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i == j) r(i, j) = Scalar(0);
            else if (comp[static_cast<std::size_t>(i)] != comp[static_cast<std::size_t>(j)]) r(i, j) = infinity<Scalar>();
            else r(i, j) = pinv(i, i) + pinv(j, j) - Scalar(2) * pinv(i, j);
        }
    }
    return r;
}

template <typename Scalar>
[[nodiscard]] Matrix<Scalar> resistance_matrix(const WeightedLaplacian<Scalar>& l, double tol_rel = default_tol_zero) {
    return resistance_matrix(l.matrix, tol_rel);
}

/// r_ij = (e_i - e_j)^T L^+ (e_i - e_j), or +inf across components.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar effective_resistance(const Eigen::MatrixBase<Derived>& laplacian, int i, int j,
                                                            double tol_rel = default_tol_zero) {
    using Scalar = typename Derived::Scalar;
    const auto k = static_cast<int>(laplacian.rows());
    if (i < 0 || j < 0 || i >= k || j >= k) throw Error(ErrorCode::IndexOutOfRange, "resistance node");
    if (i == j) throw Error(ErrorCode::InvalidArgument, "effective resistance needs i != j");
    const std::vector<int> comp = matrix_components(laplacian);
    if (comp[static_cast<std::size_t>(i)] != comp[static_cast<std::size_t>(j)]) return infinity<Scalar>();
    const Matrix<Scalar> pinv = pseudoinverse(laplacian, tol_rel);
    return pinv(i, i) + pinv(j, j) - Scalar(2) * pinv(i, j);
}

template <typename Scalar>
[[nodiscard]] Scalar effective_resistance(const WeightedLaplacian<Scalar>& l, int i, int j,
                                          double tol_rel = default_tol_zero) {
    if (i >= 0 && j >= 0 && i < l.graph.node_count() && j < l.graph.node_count() && i != j &&
        l.components[static_cast<std::size_t>(i)] != l.components[static_cast<std::size_t>(j)]) {
        return infinity<Scalar>();
    }
    return effective_resistance(l.matrix, i, j, tol_rel);
}

/// Orthonormal basis (n x (n-1)) of the mean-zero subspace.
template <typename Scalar = double>
[[nodiscard]] Matrix<Scalar> mean_zero_basis(int n) {
    // Helmert columns: (1,...,1,-k,0,...)/sqrt(k(k+1)).
    Matrix<Scalar> q = Matrix<Scalar>::Zero(n, std::max(0, n - 1));
    for (int k = 1; k < n; ++k) {
        const Scalar s = Scalar(1) / std::sqrt(Scalar(k) * Scalar(k + 1));
        for (int i = 0; i < k; ++i) q(i, k - 1) = s;
        q(k, k - 1) = -Scalar(k) * s;
    }
    return q;
}

/// max over x orthogonal to ker B of x^T A x / x^T B x, for symmetric PSD
/// A, B. Computed on the range of B as the top eigenvalue of
/// B_r^{-1/2} A_r B_r^{-1/2}. Returns 0 when B vanishes.
template <typename DerivedA, typename DerivedB>
[[nodiscard]] typename DerivedA::Scalar max_ratio(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedB>& b,
                                                  double tol_rel = default_tol_zero) {
    using Scalar = typename DerivedA::Scalar;
    const auto eb = eigen_symmetric(b);
    const Scalar threshold = zero_threshold(eb.values, tol_rel);
    std::vector<Eigen::Index> range;
    for (Eigen::Index i = 0; i < eb.values.size(); ++i)
        if (eb.values(i) > threshold) range.push_back(i);
    if (range.empty()) return Scalar(0);
    const auto k = static_cast<Eigen::Index>(range.size());
    Matrix<Scalar> w(b.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c)
        w.col(c) = eb.vectors.col(range[static_cast<std::size_t>(c)]) / std::sqrt(eb.values(range[static_cast<std::size_t>(c)]));
    return eigen_symmetric(Matrix<Scalar>(w.transpose() * symmetrized(a) * w)).values.maxCoeff();
}

}  // namespace conlab
