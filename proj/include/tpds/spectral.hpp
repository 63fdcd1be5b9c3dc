#pragma once

#include <complex>
#include <vector>

#include "tpds/fourier.hpp"
#include "tpds/tensor.hpp"

namespace tpds {

/// tuples[i][j] is the i-th eigenvalue (or singular value) of Fourier block j.
struct TupleSpectrum {
    std::vector<std::vector<std::complex<double>>> tuples;

    std::vector<std::complex<double>> entries() const;
};

struct TEig {
    TupleSpectrum eigentuples;
    FourierBlocks eigenvectors;  // U_j with T_j = U_j D_j U_j^{-1}
};

struct TSvd {
    TupleSpectrum singular_tuples;
    FourierBlocks u;  // T_j = U_j S_j V_j^H
    FourierBlocks s;
    FourierBlocks v;
};

/// Block-wise eigendecomposition. Eigenvalues within a block are ordered by
/// descending modulus (ties: real part, then imaginary part, descending).
/// Throws NumericalFailure for a defective block (cond(U_j) > 1e12).
TEig teig(const Tensor3& t);

TSvd tsvd(const Tensor3& t);

/// T-positive definiteness. Throws PreconditionError unless t is square and
/// ttranspose(t) == t within 1e-10 (relative to the largest entry).
bool is_tpd(const Tensor3& t);
/// Same precondition; every block Hermitian with min eigenvalue >= -1e-10 * (1 + max |eigenvalue|).
bool is_tpsd(const Tensor3& t);

/// Largest eigentuple-entry modulus (spectral radius of bcirc(a)).
double max_eigentuple_modulus(const Tensor3& a);

/// True iff every eigentuple entry has modulus < 1 - 1e-9.
bool is_stable(const Tensor3& a);

}  // namespace tpds
