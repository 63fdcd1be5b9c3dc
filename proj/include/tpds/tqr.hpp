#pragma once

#include <cstddef>
#include <vector>

#include "tpds/tensor.hpp"

namespace tpds {

/// PBH test: rank([a - lambda I, b]) = n for every eigenvalue |lambda| >= 1.
bool is_stabilizable_block(const ComplexMatrix& a, const ComplexMatrix& b);
/// (q, a) detectable iff (a^H, q^H) stabilizable.
bool is_detectable_block(const ComplexMatrix& q, const ComplexMatrix& a);

bool is_stabilizable(const Tensor3& a, const Tensor3& b);
bool is_detectable(const Tensor3& q, const Tensor3& a);

struct DareOptions {
    int fixed_point_iterations = 500;
    int newton_iterations = 50;
    double residual_tol = 1e-10;
    ComplexMatrix initial;  // empty: start from q
};

/**
 * Stabilizing solution of P = A^H P A - A^H P B (R + B^H P B)^-1 B^H P A + Q.
 *
 * Fixed-point iteration of the Riccati map until the induced gain is
 * stabilizing, then Kleinman/Newton refinement. Throws NumericalFailure when
 * the closed loop never becomes stable or the relative residual stays above
 * residual_tol.
 */
ComplexMatrix solve_dare_block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& q,
                               const ComplexMatrix& r, const DareOptions& options = {});

/// (R + B^H P B)^-1 B^H P A; the control law is u = -K x.
ComplexMatrix lqr_gain_block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& r,
                             const ComplexMatrix& p);

/// ||RHS(P) - P||_F / (1 + ||P||_F) for the block Riccati map.
double dare_residual_block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& q,
                           const ComplexMatrix& r, const ComplexMatrix& p);

/// Throws DimensionError for shapes other than q: n x n x r, rr: m x m x r,
/// and PreconditionError unless q is T-PSD and rr is T-PD.
void validate_weights(const Tensor3& q, const Tensor3& rr, std::size_t n, std::size_t m, std::size_t depth);

struct TqrSolution {
    Tensor3 p;
    Tensor3 k;
    std::vector<double> residuals;             // per Fourier block
    std::vector<double> closed_loop_radii;     // per Fourier block
};

/// Model-based TQR. Throws PreconditionError for invalid weights or a pair
/// that is not stabilizable/detectable.
TqrSolution solve_tqr(const Tensor3& a, const Tensor3& b, const Tensor3& q, const Tensor3& rr);

/// Residual of the T-algebraic Riccati equation evaluated with T-products:
/// ||A^T*P*A - A^T*P*B*(R + B^T*P*B)^-1*B^T*P*A + Q - P||_F / (1 + ||P||_F).
double is_riccati_solution(const Tensor3& p, const Tensor3& a, const Tensor3& b, const Tensor3& q,
                           const Tensor3& rr);

}  // namespace tpds
