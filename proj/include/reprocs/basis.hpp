#ifndef REPROCS_BASIS_HPP
#define REPROCS_BASIS_HPP

#include <Eigen/Dense>

#include "reprocs/errors.hpp"
#include "reprocs/rng.hpp"

namespace reprocs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Tall matrix with orthonormal columns.  An empty basis (r = 0 columns)
// is a valid value and stands for the trivial subspace {0}.
class Basis {
public:
    Basis() = default;

    // Validates orthonormality: max |Q'Q - I| must be below tol.
    explicit Basis(Matrix q, double tol = 1e-10);

    static Basis empty(Index n) { return Basis(Matrix(n, 0), 0.0); }

    // Modified Gram-Schmidt with one re-orthogonalization pass.
    // Columns that are numerically dependent are dropped.
    static Basis orthonormalized(const Matrix& a);

    const Matrix& mat() const { return q_; }
    Index dim() const { return q_.rows(); }
    Index rank() const { return q_.cols(); }
    bool is_empty() const { return q_.cols() == 0; }

    // max |Q'Q - I|, the orthonormality defect.
    double defect() const;

    // (I - QQ')v computed operator-style, never materializing n x n.
    Vector project_out(const Vector& v) const;
    Matrix project_out(const Matrix& m) const;

    // Horizontal concatenation [this other]; caller guarantees mutual
    // orthogonality (checked to tol).
    Basis concat(const Basis& other, double tol = 1e-8) const;

private:
    Matrix q_;
};

// n x r basis from i.i.d. Gaussian entries, Gram-Schmidt orthonormalized.
// Deterministic for a fixed rng state.
Basis gen_basis(Index n, Index r, Rng& rng);

// Spectral norm of (I - PhatPhat')P: the sine of the largest principal
// angle between the estimated and true subspaces.
double subspace_error(const Matrix& p_hat, const Matrix& p);
double subspace_error(const Basis& p_hat, const Basis& p);

// Largest singular value via the Gram matrix of the thinner side.
double spectral_norm(const Matrix& a);

// Orthonormal basis of the complement of span(q) in R^n.
Matrix orthonormal_complement(const Matrix& q);

// Flips column signs so each column's first nonzero entry is positive.
void normalize_column_signs(Matrix& m);

}  // namespace reprocs

#endif  // REPROCS_BASIS_HPP
