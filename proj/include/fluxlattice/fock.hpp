#ifndef FLUXLATTICE_FOCK_HPP
#define FLUXLATTICE_FOCK_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"

namespace fluxlattice {

// Dense operator on a tensor product of truncated mode spaces. Mode 0 is
// the slowest-varying index (leftmost Kronecker factor).
struct FockOperator {
    std::vector<std::string> mode_labels;
    std::vector<int> dims;
    Eigen::MatrixXcd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
    int n_modes() const { return static_cast<int>(dims.size()); }

    int mode_index(const std::string& label) const {
        for (int i = 0; i < n_modes(); ++i)
            if (mode_labels[i] == label) return i;
        throw ModelError("no mode labeled '" + label + "'");
    }

    double hermiticity_defect() const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    }
    bool is_hermitian(double rel_tol = 1e-12) const {
        const double scale = matrix.cwiseAbs().maxCoeff();
        return hermiticity_defect() <= rel_tol * std::max(scale, 1.0);
    }
};

namespace fock {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::MatrixXcd lowering(int d) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 1; m < d; ++m) c(m - 1, m) = std::sqrt(static_cast<double>(m));
    return c;
}

inline Eigen::MatrixXcd number(int d) {
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 0; m < d; ++m) n(m, m) = m;
    return n;
}

inline Eigen::MatrixXcd pauli_z() {
    Eigen::MatrixXcd s(2, 2);
    s << -1, 0, 0, 1;  // index 0 = ground
    return s;
}

inline Eigen::MatrixXcd pauli_x() {
    Eigen::MatrixXcd s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

// Embed a single-mode operator at position k of the product space.
inline Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, int k, const std::vector<int>& dims) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
        if (i == k)
            out = kron(out, op);
        else
            out = kron(out, Eigen::MatrixXcd::Identity(dims[i], dims[i]));
    }
    return out;
}

// Apply a scalar function through the eigendecomposition of a Hermitian
// operator (used for matrix cosine/sine of phase operators).
inline Eigen::MatrixXcd hermitian_function(const Eigen::MatrixXcd& h,
                                           const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    Eigen::VectorXd fe = es.eigenvalues().unaryExpr([&](double x) { return f(x); });
    return es.eigenvectors() * fe.asDiagonal() * es.eigenvectors().adjoint();
}

// Decompose a flat product-space index into per-mode indices.
inline std::vector<int> unravel(int idx, const std::vector<int>& dims) {
    std::vector<int> out(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    return out;
}

inline int ravel(const std::vector<int>& multi, const std::vector<int>& dims) {
    int idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + multi[k];
    return idx;
}

}  // namespace fock

}  // namespace fluxlattice

#endif
