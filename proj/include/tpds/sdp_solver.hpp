#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace tpds::sdp {

/**
 * Dense semidefinite program in inequality (LMI) form
 *
 *     maximize   b'y
 *     subject to C_k - sum_i y_i A_{k,i}  is PSD      for every block k
 *                c_lp - A_lp y            >= 0      componentwise
 *
 * together with its conic dual over (X_k, x_lp). Block k stores its
 * coefficient matrices column-wise: a[k] is d_k^2 x N and column i is the
 * column-major vec of the symmetric matrix A_{k,i}.
 */
struct Problem {
    Eigen::VectorXd b;
    std::vector<Eigen::MatrixXd> c;
    std::vector<Eigen::MatrixXd> a;
    Eigen::VectorXd c_lp;
    Eigen::SparseMatrix<double> a_lp;

    Eigen::Index num_vars() const { return b.size(); }
};

struct Options {
    int max_iterations = 200;
    double gap_tol = 1e-9;
    double feas_tol = 1e-9;
    double divergence = 1e10;
    // Stop early once the dual iterate is primal feasible and its objective
    // (an upper bound on the optimum) drops below this value.
    double stop_when_bound_below = -std::numeric_limits<double>::infinity();
};

enum class Termination {
    Optimal,
    BoundBelowThreshold,
    Unbounded,   // objective grows without bound (dual infeasible)
    Infeasible,  // LMI set appears empty
    MaxIterations,
    NumericalError,
};

struct Result {
    Termination status = Termination::NumericalError;
    Eigen::VectorXd y;
    std::vector<Eigen::MatrixXd> x;  // dual (primal-form) matrices
    Eigen::VectorXd x_lp;
    double objective = 0.0;       // b'y
    double dual_objective = 0.0;  // <C, X> + c_lp'x_lp, upper bound at feasibility
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    int iterations = 0;
    std::string message;
};

/// Infeasible-start primal-dual interior-point method, Nesterov-Todd
/// scaling, Mehrotra predictor-corrector. Deterministic: fixed start at a
/// scaled identity.
Result solve(const Problem& problem, const Options& options = {});

const char* to_string(Termination t);

}  // namespace tpds::sdp
