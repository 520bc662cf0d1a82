#ifndef REPROCS_PCP_HPP
#define REPROCS_PCP_HPP

#include <vector>

#include "reprocs/basis.hpp"

namespace reprocs::pcp {

// Entrywise soft threshold: sign(x) max(|x| - tau, 0).
double shrink(double x, double tau);
Matrix shrink(const Matrix& m, double tau);

// Singular value thresholding on the thin dimension.
Matrix svt(const Matrix& m, double tau);

// Canonical PCP weight 1/sqrt(max(rows, cols)).
double default_lambda(Index rows, Index cols);

struct PcpOptions {
    double tol = 1e-7;    // relative Frobenius feasibility residual
    int max_iter = 500;
    double rho = 1.5;     // penalty growth factor
    double mu_scale = 1.25;  // initial penalty = mu_scale / ||M||_2
};

struct PcpSolution {
    Matrix l;
    Matrix s;
    int iterations = 0;
    double primal_residual = 0.0;  // ||M - L - S||_F / ||M||_F of the kept pair
    bool converged = true;         // false: best iterate after max_iter
    // Best feasibility residual reachable after each outer iteration;
    // nonincreasing because the solver keeps the best iterate.
    std::vector<double> residual_history;
};

// Principal Components Pursuit,  min ||L||_* + lambda ||S||_1
// s.t. L + S = M,  via the inexact augmented Lagrangian method with
// singular-value thresholding.  Non-convergence is reported through the
// flags, not an exception.
PcpSolution pcp_solve(const Matrix& m, double lambda, double tol = 1e-7,
                      int max_iter = 500);
PcpSolution pcp_solve(const Matrix& m, double lambda, const PcpOptions& opt);

// Growing-prefix comparison protocol: solve PCP on [m_1..m_t] at
// t = stride, 2*stride, ... and score the sparse part per column against
// the true X.
struct PcpSnapshot {
    long t = 0;
    int iterations = 0;
    bool converged = true;
    double primal_residual = 0.0;
    std::vector<double> col_rel_err;  // per column 1..t
};

std::vector<PcpSnapshot> pcp_schedule(const Matrix& m_full,
                                      const Matrix& x_true, long stride,
                                      const PcpOptions& opt = {});

}  // namespace reprocs::pcp

#endif  // REPROCS_PCP_HPP
