#ifndef FLUXLATTICE_PROPAGATE_HPP
#define FLUXLATTICE_PROPAGATE_HPP

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"
#include "fluxlattice/fock.hpp"

namespace fluxlattice {

// Sum-of-products operator on a tensor product space: each term is a
// coefficient times single-mode factors on distinct modes. Purely
// diagonal terms are folded into one diagonal on finalize() so the
// frequent case (number operators, sigma_z) costs a single pass.
struct TensorOperator {
    struct Term {
        std::complex<double> coef{1.0, 0.0};
        std::vector<std::pair<int, Eigen::MatrixXcd>> factors;
    };

    std::vector<int> dims;
    std::vector<Term> terms;        // non-diagonal terms after finalize()
    Eigen::VectorXcd diagonal;      // folded diagonal part
    bool finalized = false;

    long dim() const {
        long d = 1;
        for (int x : dims) d *= x;
        return d;
    }

    void add_term(std::complex<double> coef,
                  std::vector<std::pair<int, Eigen::MatrixXcd>> factors) {
        if (finalized) throw ModelError("operator already finalized");
        terms.push_back({coef, std::move(factors)});
    }

    void finalize() {
        if (finalized) return;
        diagonal = Eigen::VectorXcd::Zero(dim());
        std::vector<Term> keep;
        for (auto& t : terms) {
            bool diag = true;
            for (const auto& [k, f] : t.factors) {
                (void)k;
                if ((f - Eigen::MatrixXcd(f.diagonal().asDiagonal())).cwiseAbs().maxCoeff() >
                    0.0)
                    diag = false;
            }
            if (!diag) {
                keep.push_back(std::move(t));
                continue;
            }
            const long n = dim();
            for (long idx = 0; idx < n; ++idx) {
                const auto multi = fock::unravel(static_cast<int>(idx), dims);
                std::complex<double> v = t.coef;
                for (const auto& [k, f] : t.factors) v *= f(multi[k], multi[k]);
                diagonal(idx) += v;
            }
        }
        terms = std::move(keep);
        finalized = true;
    }

    // out = (this) * in
    void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
        if (!finalized) throw ModelError("operator not finalized");
        out = diagonal.cwiseProduct(in);
        Eigen::VectorXcd scratch;
        for (const auto& t : terms) {
            scratch = in;
            Eigen::VectorXcd next;
            for (const auto& [k, f] : t.factors) {
                apply_one_mode(scratch, k, f, next);
                scratch.swap(next);
            }
            out += t.coef * scratch;
        }
    }

    Eigen::MatrixXcd dense() const {
        const long n = dim();
        Eigen::MatrixXcd m(n, n);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n), col;
        for (long j = 0; j < n; ++j) {
            e(j) = 1.0;
            apply(e, col);
            m.col(j) = col;
            e(j) = 0.0;
        }
        return m;
    }

    // upper bound on the spectral norm: |diag|_max + sum |coef| prod |factor|
    double norm_bound() const {
        if (!finalized) throw ModelError("operator not finalized");
        double b = diagonal.size() > 0 ? diagonal.cwiseAbs().maxCoeff() : 0.0;
        for (const auto& t : terms) {
            double p = std::abs(t.coef);
            for (const auto& [k, f] : t.factors) {
                (void)k;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f.adjoint() * f);
                p *= std::sqrt(es.eigenvalues().maxCoeff());
            }
            b += p;
        }
        return b;
    }

    // out = (I x ... x f_k x ... x I) in
    void apply_one_mode(const Eigen::VectorXcd& in, int k, const Eigen::MatrixXcd& f,
                        Eigen::VectorXcd& out) const {
        const int d = dims[k];
        long right = 1;
        for (std::size_t i = k + 1; i < dims.size(); ++i) right *= dims[i];
        const long left = dim() / (d * right);
        out.resize(in.size());
        for (long l = 0; l < left; ++l) {
            const long base = l * d * right;
            for (long r = 0; r < right; ++r) {
                for (int a = 0; a < d; ++a) {
                    std::complex<double> acc = 0.0;
                    for (int b = 0; b < d; ++b) acc += f(a, b) * in(base + b * right + r);
                    out(base + a * right + r) = acc;
                }
            }
        }
    }
};

namespace gates {

// In-place psi <- (gate on mode k) psi. The right-stride slices are
// contiguous, so each (left, row) block is a mapped matrix and the gate
// application is a small dense product.
inline void apply_one_mode_gate(Eigen::VectorXcd& psi, const std::vector<int>& dims, int k,
                                const Eigen::MatrixXcd& g) {
    const int d = dims[k];
    long right = 1;
    for (std::size_t i = k + 1; i < dims.size(); ++i) right *= dims[i];
    long total = 1;
    for (int x : dims) total *= x;
    const long left = total / (d * right);
    Eigen::MatrixXcd V(right, d), W(right, d);
    for (long l = 0; l < left; ++l) {
        const long base = l * d * right;
        for (int b = 0; b < d; ++b)
            V.col(b) = Eigen::Map<const Eigen::VectorXcd>(psi.data() + base + b * right, right);
        W.noalias() = V * g.transpose();
        for (int a = 0; a < d; ++a)
            Eigen::Map<Eigen::VectorXcd>(psi.data() + base + a * right, right) = W.col(a);
    }
}

// In-place two-mode gate, k1 < k2; g is (d1*d2) x (d1*d2) with mode k1 as
// the slower index.
inline void apply_two_mode_gate(Eigen::VectorXcd& psi, const std::vector<int>& dims, int k1,
                                int k2, const Eigen::MatrixXcd& g) {
    if (k1 > k2) throw ModelError("two-mode gate expects k1 < k2");
    const int d1 = dims[k1], d2 = dims[k2];
    long total = 1;
    for (int x : dims) total *= x;
    long right2 = 1;
    for (std::size_t i = k2 + 1; i < dims.size(); ++i) right2 *= dims[i];
    long mid = 1;
    for (int i = k1 + 1; i < k2; ++i) mid *= dims[i];
    const long left = total / (d1 * mid * d2 * right2);
    const long stride1 = mid * d2 * right2;
    const int dd = d1 * d2;
    Eigen::MatrixXcd V(right2, dd), W(right2, dd);
    for (long l = 0; l < left; ++l) {
        for (long m = 0; m < mid; ++m) {
            const long base = l * d1 * stride1 + m * d2 * right2;
            for (int b1 = 0; b1 < d1; ++b1)
                for (int b2 = 0; b2 < d2; ++b2)
                    V.col(b1 * d2 + b2) = Eigen::Map<const Eigen::VectorXcd>(
                        psi.data() + base + b1 * stride1 + b2 * right2, right2);
            W.noalias() = V * g.transpose();
            for (int a1 = 0; a1 < d1; ++a1)
                for (int a2 = 0; a2 < d2; ++a2)
                    Eigen::Map<Eigen::VectorXcd>(
                        psi.data() + base + a1 * stride1 + a2 * right2, right2) =
                        W.col(a1 * d2 + a2);
        }
    }
}

inline void apply_diagonal_phase(Eigen::VectorXcd& psi, const Eigen::VectorXcd& phase) {
    psi = phase.cwiseProduct(psi);
}

// exp(-i t h) for a small Hermitian block
inline Eigen::MatrixXcd small_exp(const Eigen::MatrixXcd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericError("gate diagonalization failed");
    const std::complex<double> im(0.0, 1.0);
    Eigen::VectorXcd ph =
        es.eigenvalues().unaryExpr([&](double x) { return std::exp(-im * x * t); });
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace gates

// <psi| (op on mode k) |psi>, real part (op Hermitian)
inline double expect_one_mode(const Eigen::VectorXcd& psi, const std::vector<int>& dims,
                              int k, const Eigen::MatrixXcd& op) {
    const int d = dims[k];
    long right = 1;
    for (std::size_t i = k + 1; i < dims.size(); ++i) right *= dims[i];
    const long total = psi.size();
    const long left = total / (d * right);
    std::complex<double> acc = 0.0;
    Eigen::MatrixXcd V(right, d);
    for (long l = 0; l < left; ++l) {
        const long base = l * d * right;
        for (int b = 0; b < d; ++b)
            V.col(b) = Eigen::Map<const Eigen::VectorXcd>(psi.data() + base + b * right, right);
        acc += (V.conjugate().cwiseProduct(V * op.transpose())).sum();
    }
    return acc.real();
}

}  // namespace fluxlattice

#endif
