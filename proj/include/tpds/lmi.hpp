#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tpds/tensor.hpp"

namespace tpds {

/// F(x) = base + sum_i x_i F_i with symmetric real matrices. Coefficients
/// are stored column-wise: column i is the column-major vec of F_i.
struct AffineMatrixMap {
    RealMatrix base;
    RealMatrix coefficients;

    AffineMatrixMap() = default;
    AffineMatrixMap(RealMatrix base, RealMatrix coefficients);

    Eigen::Index dim() const { return base.rows(); }
    Eigen::Index num_vars() const { return coefficients.cols(); }
    Eigen::Map<const RealMatrix> coefficient(Eigen::Index i) const {
        return {coefficients.col(i).data(), dim(), dim()};
    }
    RealMatrix evaluate(const Eigen::VectorXd& x) const;

    /// Builds the map of an affine matrix-valued function by probing it at
    /// zero and at every unit vector. f must be affine and symmetric-valued.
    static AffineMatrixMap from_function(Eigen::Index num_vars,
                                         const std::function<RealMatrix(const Eigen::VectorXd&)>& f);
};

/// lhs * x = rhs, one row per scalar equation.
struct LinearEqualities {
    RealMatrix lhs;
    Eigen::VectorXd rhs;

    Eigen::Index size() const { return lhs.rows(); }
    static LinearEqualities from_function(Eigen::Index num_vars,
                                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f);
    static LinearEqualities stack(const LinearEqualities& a, const LinearEqualities& b);
};

enum class SdpStatus { StrictlyFeasible, Optimal, Infeasible, NumericalFailure };

const char* to_string(SdpStatus s);

struct SdpSolution {
    Eigen::VectorXd variables;
    SdpStatus status = SdpStatus::NumericalFailure;
    // Feasibility: achieved min eigenvalue over all constraints.
    // Optimization: objective value.
    double certificate = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    std::string message;
};

/// [[Re h, -Im h], [Im h, Re h]]. Throws PreconditionError unless h is
/// Hermitian within 1e-10 (relative).
RealMatrix realify(const ComplexMatrix& h);

struct FeasibilityOptions {
    double margin = 1e-6;
    double variable_bound = 1e6;  // box on the reduced variables
    int max_iterations = 200;
};

/**
 * Searches for x with every constraint map strictly positive definite and
 * the equalities satisfied.
 *
 * The equalities are eliminated by a null-space projection; directions that
 * do not move any constraint are dropped; then the auxiliary program
 * max { t : F_k(x) - t I >= 0 } is solved. StrictlyFeasible needs
 * t >= margin, re-checked on the original maps.
 */
SdpSolution find_strictly_feasible(const std::vector<AffineMatrixMap>& constraints,
                                   const LinearEqualities& equalities,
                                   const FeasibilityOptions& options = {});

/// max c'x subject to every map PSD. Unbounded objectives report
/// NumericalFailure.
SdpSolution maximize_linear(const Eigen::VectorXd& objective,
                            const std::vector<AffineMatrixMap>& constraints, int max_iterations = 200);

/// Real coordinates of a Hermitian (or, with complex_valued = false, real
/// symmetric) dim x dim matrix: diagonal, then upper real parts, then upper
/// imaginary parts.
class HermitianBasis {
public:
    HermitianBasis(Eigen::Index dim, bool complex_valued);

    Eigen::Index dim() const { return dim_; }
    Eigen::Index size() const;
    bool complex_valued() const { return complex_; }
    ComplexMatrix element(Eigen::Index k) const;
    ComplexMatrix assemble(const Eigen::VectorXd& coords) const;

private:
    Eigen::Index dim_;
    bool complex_;
};

struct TraceMaximum {
    SdpSolution solution;
    ComplexMatrix p;
};

/// max trace(P) s.t. P = P^H >= 0 and lhs(P) <= 0, where lhs is affine in P
/// and Hermitian-valued. Complex problems are solved on their real embedding.
TraceMaximum maximize_trace(Eigen::Index p_dim, bool complex_valued,
                            const std::function<ComplexMatrix(const ComplexMatrix&)>& lhs,
                            int max_iterations = 200);

}  // namespace tpds
