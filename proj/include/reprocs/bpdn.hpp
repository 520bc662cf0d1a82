#ifndef REPROCS_BPDN_HPP
#define REPROCS_BPDN_HPP

#include "reprocs/basis.hpp"

namespace reprocs::solver {

// Basis pursuit denoising against an orthogonal projector:
//   min ||x||_1  s.t.  ||y - Phi x||_2 <= xi,   Phi = I - P P'.
// Phi is applied operator-style as v - P (P'v); the n x n matrix is never
// materialized.  An empty P (zero columns) means Phi = I.
struct BpdnProblem {
    Matrix basis;  // P, orthonormal columns (may have 0 columns)
    Vector y;
    double xi = 0.0;
};

struct BpdnOptions {
    double tol = 1e-6;     // feasibility / optimality tolerance (relative)
    int max_inner = 10000; // proximal-gradient iterations per penalty value
    int max_outer = 50;    // root-find steps on the penalty
};

// Warm-start carrier for streaming use: the previous frame's solution and
// penalty value.
struct BpdnWarmStart {
    Vector x;
    double mu = 0.0;
    bool valid = false;
};

struct BpdnResult {
    Vector x;
    double residual = 0.0;  // ||y - Phi x||_2
    double mu = 0.0;        // penalty at the returned point
    int inner_iterations = 0;
    int outer_iterations = 0;
    double kkt_gap = 0.0;  // max(0, ||Phi(y - Phi x)||_inf / mu - 1)
    bool exact_root = false;  // true when the support-polish root finder closed the problem
};

// Accelerated proximal gradient (step size 1; the projector has unit
// Lipschitz constant) on  min 1/2||y - Phi x||^2 + mu ||x||_1,  with an
// outer root-find on mu so that ||y - Phi x(mu)||_2 = xi.  The residual is
// monotone in mu, so bisection brackets the root; when the active support
// stabilizes the root is closed in closed form and certified against the
// KKT conditions.  Throws SolverError when the target residual cannot be
// met within the iteration budget.
BpdnResult bpdn_solve(const BpdnProblem& prob, const BpdnOptions& opt = {},
                      BpdnWarmStart* warm = nullptr);

}  // namespace reprocs::solver

#endif  // REPROCS_BPDN_HPP
