#include "reprocs/basis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace reprocs {

Basis::Basis(Matrix q, double tol) : q_(std::move(q)) {
    if (q_.cols() > q_.rows()) {
        throw DimensionError("basis rank exceeds ambient dimension");
    }
    if (tol > 0.0 && q_.cols() > 0) {
        const double d = defect();
        if (!(d <= tol)) {
            throw NumericalError("columns are not orthonormal, defect " +
                                     std::to_string(d),
                                 d);
        }
    }
}

double Basis::defect() const {
    if (q_.cols() == 0) return 0.0;
    Matrix g = q_.transpose() * q_;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

Basis Basis::orthonormalized(const Matrix& a) {
    Matrix q(a.rows(), a.cols());
    Index kept = 0;
    for (Index j = 0; j < a.cols(); ++j) {
        Vector v = a.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Index i = 0; i < kept; ++i) {
                v -= q.col(i).dot(v) * q.col(i);
            }
        }
        const double norm = v.norm();
        if (norm > 1e-12 * std::max(1.0, a.col(j).norm())) {
            q.col(kept++) = v / norm;
        }
    }
    q.conservativeResize(Eigen::NoChange, kept);
    return Basis(std::move(q), 0.0);
}

Vector Basis::project_out(const Vector& v) const {
    if (q_.cols() == 0) return v;
    return v - q_ * (q_.transpose() * v);
}

Matrix Basis::project_out(const Matrix& m) const {
    if (q_.cols() == 0) return m;
    return m - q_ * (q_.transpose() * m);
}

Basis Basis::concat(const Basis& other, double tol) const {
    if (other.is_empty()) return *this;
    if (is_empty()) {
        if (q_.rows() != 0 && q_.rows() != other.dim()) {
            throw DimensionError("basis concat dimension mismatch");
        }
        return other;
    }
    if (dim() != other.dim()) {
        throw DimensionError("basis concat dimension mismatch");
    }
    const double cross = (q_.transpose() * other.mat()).cwiseAbs().maxCoeff();
    if (!(cross <= tol)) {
        throw NumericalError("basis blocks are not mutually orthogonal", cross);
    }
    Matrix joined(dim(), rank() + other.rank());
    joined << q_, other.mat();
    return Basis(std::move(joined), 0.0);
}

Basis gen_basis(Index n, Index r, Rng& rng) {
    if (r < 1 || r > n) {
        throw DimensionError("gen_basis requires 1 <= r <= n");
    }
    Matrix a(n, r);
    for (Index j = 0; j < r; ++j) {
        for (Index i = 0; i < n; ++i) {
            a(i, j) = rng.normal();
        }
    }
    Basis b = Basis::orthonormalized(a);
    if (b.rank() != r) {
        // A Gaussian matrix is rank deficient with probability zero; a
        // failure here means n or r is degenerate.
        throw NumericalError("random basis lost rank during Gram-Schmidt",
                             static_cast<double>(b.rank()));
    }
    return b;
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    const Matrix& thin = a;
    Matrix gram;
    if (thin.cols() <= thin.rows()) {
        gram = thin.transpose() * thin;
    } else {
        gram = thin * thin.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lmax));
}

double subspace_error(const Matrix& p_hat, const Matrix& p) {
    if (p.cols() == 0) return 0.0;
    if (p_hat.cols() == 0) return spectral_norm(p);
    if (p_hat.rows() != p.rows()) {
        throw DimensionError("subspace_error dimension mismatch");
    }
    Matrix residual = p - p_hat * (p_hat.transpose() * p);
    return spectral_norm(residual);
}

double subspace_error(const Basis& p_hat, const Basis& p) {
    return subspace_error(p_hat.mat(), p.mat());
}

Matrix orthonormal_complement(const Matrix& q) {
    const Index n = q.rows();
    const Index r = q.cols();
    if (r == 0) return Matrix::Identity(n, n);
    Eigen::HouseholderQR<Matrix> qr(q);
    Matrix full = qr.householderQ() * Matrix::Identity(n, n);
    return full.rightCols(n - r);
}

void normalize_column_signs(Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            const double v = m(i, j);
            if (v != 0.0) {
                if (v < 0.0) m.col(j) = -m.col(j);
                break;
            }
        }
    }
}

}  // namespace reprocs
