#include "tpds/spectral.hpp"

#include <algorithm>
#include <string>

#include "tpds/errors.hpp"
#include "tpds/linalg.hpp"

namespace tpds {

namespace {

using cplx = std::complex<double>;

void require_square(const Tensor3& t, const char* op) {
    if (t.rows() != t.cols()) {
        throw DimensionError(std::string(op) + ": tensor is not square in modes 1-2");
    }
}

void require_t_symmetric(const Tensor3& t, const char* op) {
    require_square(t, op);
    if (max_abs_diff(ttranspose(t), t) > 1e-10 * (1.0 + t.max_abs())) {
        throw PreconditionError(std::string(op) + ": tensor is not T-symmetric");
    }
}

// Eigenvalues of the Hermitian part of each block, ascending.
std::vector<Eigen::VectorXd> hermitian_block_spectra(const Tensor3& t) {
    const FourierBlocks fb = to_fourier(t);
    std::vector<Eigen::VectorXd> out;
    const std::size_t r = fb.depth();
    for (std::size_t j = 0; j < unique_block_count(r); ++j) {
        const ComplexMatrix h = 0.5 * (fb.blocks[j] + fb.blocks[j].adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
        out.push_back(es.eigenvalues());
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> TupleSpectrum::entries() const {
    std::vector<cplx> out;
    for (const auto& t : tuples) {
        out.insert(out.end(), t.begin(), t.end());
    }
    return out;
}

TEig teig(const Tensor3& t) {
    require_square(t, "teig");
    const FourierBlocks fb = to_fourier(t);
    const std::size_t r = fb.depth();
    const auto n = static_cast<Eigen::Index>(t.rows());

    TEig out;
    out.eigentuples.tuples.assign(t.rows(), std::vector<cplx>(r));
    out.eigenvectors.rows = t.rows();
    out.eigenvectors.cols = t.rows();
    out.eigenvectors.blocks.resize(r);
    for (std::size_t j = 0; j < r; ++j) {
        Eigen::ComplexEigenSolver<ComplexMatrix> es(fb.blocks[j], true);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            order[static_cast<std::size_t>(i)] = i;
        }
        std::vector<cplx> vals(es.eigenvalues().begin(), es.eigenvalues().end());
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return eigenvalue_precedes(vals[static_cast<std::size_t>(a)], vals[static_cast<std::size_t>(b)]);
        });
        ComplexMatrix u(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto src = order[static_cast<std::size_t>(i)];
            out.eigentuples.tuples[static_cast<std::size_t>(i)][j] = vals[static_cast<std::size_t>(src)];
            u.col(i) = es.eigenvectors().col(src);
        }
        Eigen::JacobiSVD<ComplexMatrix> svd(u);
        const auto& s = svd.singularValues();
        if (n > 0 && (s(n - 1) == 0.0 || s(0) / s(n - 1) > 1e12)) {
            throw NumericalFailure("teig: Fourier block " + std::to_string(j + 1) + " is defective");
        }
        out.eigenvectors.blocks[j] = std::move(u);
    }
    return out;
}

TSvd tsvd(const Tensor3& t) {
    const FourierBlocks fb = to_fourier(t);
    const std::size_t r = fb.depth();
    const auto n = static_cast<Eigen::Index>(t.rows());
    const auto m = static_cast<Eigen::Index>(t.cols());
    const Eigen::Index k = std::min(n, m);

    TSvd out;
    out.singular_tuples.tuples.assign(static_cast<std::size_t>(k), std::vector<cplx>(r));
    out.u = {t.rows(), t.rows(), std::vector<ComplexMatrix>(r)};
    out.s = {t.rows(), t.cols(), std::vector<ComplexMatrix>(r)};
    out.v = {t.cols(), t.cols(), std::vector<ComplexMatrix>(r)};
    for (std::size_t j = 0; j < r; ++j) {
        Eigen::JacobiSVD<ComplexMatrix> svd(fb.blocks[j], Eigen::ComputeFullU | Eigen::ComputeFullV);
        ComplexMatrix s = ComplexMatrix::Zero(n, m);
        for (Eigen::Index i = 0; i < k; ++i) {
            s(i, i) = svd.singularValues()(i);
            out.singular_tuples.tuples[static_cast<std::size_t>(i)][j] = svd.singularValues()(i);
        }
        out.u.blocks[j] = svd.matrixU();
        out.s.blocks[j] = std::move(s);
        out.v.blocks[j] = svd.matrixV();
    }
    return out;
}

bool is_tpd(const Tensor3& t) {
    require_t_symmetric(t, "is_tpd");
    for (const auto& ev : hermitian_block_spectra(t)) {
        if (ev.size() == 0) {
            continue;
        }
        const double hi = ev.maxCoeff();
        if (hi <= 0.0 || ev.minCoeff() <= 1e-10 * hi) {
            return false;
        }
    }
    return true;
}

bool is_tpsd(const Tensor3& t) {
    require_t_symmetric(t, "is_tpsd");
    for (const auto& ev : hermitian_block_spectra(t)) {
        if (ev.size() == 0) {
            continue;
        }
        const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
        if (ev.minCoeff() < -1e-10 * scale) {
            return false;
        }
    }
    return true;
}

double max_eigentuple_modulus(const Tensor3& a) {
    require_square(a, "max_eigentuple_modulus");
    const FourierBlocks fb = to_fourier(a);
    double rho = 0.0;
    for (std::size_t j = 0; j < unique_block_count(fb.depth()); ++j) {
        rho = std::max(rho, spectral_radius(fb.blocks[j]));
    }
    return rho;
}

bool is_stable(const Tensor3& a) { return max_eigentuple_modulus(a) < 1.0 - 1e-9; }

}  // namespace tpds
