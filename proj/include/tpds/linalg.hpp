#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tpds/tensor.hpp"

namespace tpds {

// Shared relative rank threshold: sigma > max(rows, cols) * max(sigma_max, scale) * kRankTol.
// A positive scale makes the test relative to the problem the matrix came from,
// so a matrix made only of rounding noise has rank zero.
inline constexpr double kRankTol = 1e-10;

int numerical_rank(const Eigen::VectorXd& singular_values, Eigen::Index rows, Eigen::Index cols,
                   double scale = 0.0);
int numerical_rank(const RealMatrix& m, double scale = 0.0);
int numerical_rank(const ComplexMatrix& m, double scale = 0.0);

// Moore-Penrose pseudoinverse with the shared rank threshold.
RealMatrix pinv(const RealMatrix& m);
ComplexMatrix pinv(const ComplexMatrix& m);

// Eigenvalues of a square complex matrix ordered by descending modulus,
// ties broken by descending real part, then descending imaginary part.
std::vector<std::complex<double>> ordered_eigenvalues(const ComplexMatrix& m);
bool eigenvalue_precedes(const std::complex<double>& a, const std::complex<double>& b);
void sort_eigenvalues(std::vector<std::complex<double>>& v);

double spectral_radius(const ComplexMatrix& m);
double spectral_radius(const RealMatrix& m);

// Orthonormal basis of the null space (columns), shared rank threshold.
RealMatrix null_space(const RealMatrix& m);

}  // namespace tpds
