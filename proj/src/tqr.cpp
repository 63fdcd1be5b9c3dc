#include "tpds/tqr.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "tpds/errors.hpp"
#include "tpds/fourier.hpp"
#include "tpds/linalg.hpp"
#include "tpds/spectral.hpp"

namespace tpds {

using Eigen::Index;

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix riccati_map(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& q,
                          const ComplexMatrix& r, const ComplexMatrix& p) {
    const ComplexMatrix pa = p * a;
    const ComplexMatrix bpa = b.adjoint() * pa;
    const ComplexMatrix g = r + b.adjoint() * p * b;
    return hermitian_part(a.adjoint() * pa - bpa.adjoint() * g.lu().solve(bpa) + q);
}

// Solves P = F^H P F + W for Hermitian W.
ComplexMatrix solve_stein(const ComplexMatrix& f, const ComplexMatrix& w) {
    const Index n = f.rows();
    // vec(F^H P F) = (F^T kron F^H) vec(P)
    ComplexMatrix lhs = ComplexMatrix::Identity(n * n, n * n);
    const ComplexMatrix fh = f.adjoint();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) lhs.block(i * n, j * n, n, n) -= f(j, i) * fh;
    Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(w.data(), n * n);
    Eigen::VectorXcd sol = lhs.partialPivLu().solve(rhs);
    return hermitian_part(Eigen::Map<ComplexMatrix>(sol.data(), n, n));
}

void require_square(const ComplexMatrix& m, Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) throw DimensionError(std::string(what) + " has wrong shape");
}

}  // namespace

bool is_stabilizable_block(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Index n = a.rows();
    if (a.cols() != n || b.rows() != n) throw DimensionError("stabilizability: incompatible shapes");
    if (n == 0) return true;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, false);
    const double scale = std::max(a.norm(), b.norm());
    for (Index i = 0; i < n; ++i) {
        const std::complex<double> lambda = es.eigenvalues()(i);
        if (std::abs(lambda) < 1.0 - 1e-9) continue;
        ComplexMatrix pbh(n, n + b.cols());
        pbh << a - lambda * ComplexMatrix::Identity(n, n), b;
        if (numerical_rank(pbh, scale) < n) return false;
    }
    return true;
}

bool is_detectable_block(const ComplexMatrix& q, const ComplexMatrix& a) {
    return is_stabilizable_block(a.adjoint(), q.adjoint());
}

bool is_stabilizable(const Tensor3& a, const Tensor3& b) {
    if (a.rows() != a.cols() || b.rows() != a.rows() || a.depth() != b.depth())
        throw DimensionError("is_stabilizable: incompatible shapes");
    const FourierBlocks fa = to_fourier(a);
    const FourierBlocks fb = to_fourier(b);
    for (std::size_t j = 0; j < unique_block_count(a.depth()); ++j)
        if (!is_stabilizable_block(fa.blocks[j], fb.blocks[j])) return false;
    return true;
}

bool is_detectable(const Tensor3& q, const Tensor3& a) { return is_stabilizable(ttranspose(a), ttranspose(q)); }

ComplexMatrix lqr_gain_block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& r,
                             const ComplexMatrix& p) {
    const ComplexMatrix g = r + b.adjoint() * p * b;
    return g.lu().solve(b.adjoint() * p * a);
}

double dare_residual_block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& q,
                           const ComplexMatrix& r, const ComplexMatrix& p) {
    return (riccati_map(a, b, q, r, p) - p).norm() / (1.0 + p.norm());
}

ComplexMatrix solve_dare_block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& q,
                               const ComplexMatrix& r, const DareOptions& options) {
    const Index n = a.rows();
    require_square(a, n, "A");
    require_square(q, n, "Q");
    require_square(r, b.cols(), "R");
    if (b.rows() != n) throw DimensionError("B has wrong row count");

    ComplexMatrix p = options.initial.size() ? hermitian_part(options.initial) : hermitian_part(q);
    require_square(p, n, "initial P");

    auto stabilizing = [&](const ComplexMatrix& k) { return spectral_radius(ComplexMatrix(a - b * k)) < 1.0 - 1e-12; };

    ComplexMatrix k = lqr_gain_block(a, b, r, p);
    int it = 0;
    while (!stabilizing(k)) {
        if (++it > options.fixed_point_iterations)
            throw NumericalFailure("Riccati iteration did not reach a stabilizing gain");
        p = riccati_map(a, b, q, r, p);
        if (!p.allFinite()) throw NumericalFailure("Riccati iteration diverged");
        k = lqr_gain_block(a, b, r, p);
    }

    for (int step = 0; step < options.newton_iterations; ++step) {
        const ComplexMatrix acl = a - b * k;
        const ComplexMatrix next = solve_stein(acl, hermitian_part(q + k.adjoint() * r * k));
        const double change = (next - p).norm();
        p = next;
        k = lqr_gain_block(a, b, r, p);
        if (change <= 1e-14 * (1.0 + p.norm())) break;
    }
    const double res = dare_residual_block(a, b, q, r, p);
    if (!(res <= options.residual_tol))
        throw NumericalFailure("Riccati residual " + std::to_string(res) + " above tolerance");
    if (!stabilizing(k)) throw NumericalFailure("Riccati solution is not stabilizing");
    return p;
}

void validate_weights(const Tensor3& q, const Tensor3& rr, std::size_t n, std::size_t m, std::size_t depth) {
    if (q.rows() != n || q.cols() != n || q.depth() != depth)
        throw DimensionError("Q must be " + std::to_string(n) + "x" + std::to_string(n) + "x" + std::to_string(depth));
    if (rr.rows() != m || rr.cols() != m || rr.depth() != depth)
        throw DimensionError("R must be " + std::to_string(m) + "x" + std::to_string(m) + "x" + std::to_string(depth));
    if (!is_tpsd(q)) throw PreconditionError("Q is not T-positive semidefinite");
    if (m > 0 && !is_tpd(rr)) throw PreconditionError("R is not T-positive definite");
}

TqrSolution solve_tqr(const Tensor3& a, const Tensor3& b, const Tensor3& q, const Tensor3& rr) {
    const std::size_t n = a.rows(), m = b.cols(), r = a.depth();
    if (a.cols() != n || b.rows() != n || b.depth() != r) throw DimensionError("solve_tqr: incompatible A, B");
    validate_weights(q, rr, n, m, r);

    const FourierBlocks fa = to_fourier(a), fb = to_fourier(b), fq = to_fourier(q), fr = to_fourier(rr);
    const std::size_t unique = unique_block_count(r);
    for (std::size_t j = 0; j < unique; ++j) {
        if (!is_stabilizable_block(fa.blocks[j], fb.blocks[j]))
            throw PreconditionError("(A, B) is not stabilizable in Fourier block " + std::to_string(j + 1));
        if (!is_detectable_block(fq.blocks[j], fa.blocks[j]))
            throw PreconditionError("(Q, A) is not detectable in Fourier block " + std::to_string(j + 1));
    }

    std::vector<ComplexMatrix> ps, ks;
    TqrSolution sol;
    sol.residuals.resize(r);
    sol.closed_loop_radii.resize(r);
    for (std::size_t j = 0; j < unique; ++j) {
        ComplexMatrix aj = fa.blocks[j], bj = fb.blocks[j], qj = hermitian_part(fq.blocks[j]),
                      rj = hermitian_part(fr.blocks[j]);
        if (is_self_conjugate(j, r)) {
            aj = aj.real().cast<std::complex<double>>();
            bj = bj.real().cast<std::complex<double>>();
            qj = qj.real().cast<std::complex<double>>();
            rj = rj.real().cast<std::complex<double>>();
        }
        ComplexMatrix pj = solve_dare_block(aj, bj, qj, rj);
        ComplexMatrix kj = lqr_gain_block(aj, bj, rj, pj);
        const double res = dare_residual_block(aj, bj, qj, rj, pj);
        const double rad = spectral_radius(ComplexMatrix(aj - bj * kj));
        sol.residuals[j] = sol.residuals[mirror_index(j, r)] = res;
        sol.closed_loop_radii[j] = sol.closed_loop_radii[mirror_index(j, r)] = rad;
        ps.push_back(std::move(pj));
        ks.push_back(std::move(kj));
    }
    sol.p = from_fourier(mirror_unique_blocks(std::move(ps), r));
    sol.k = from_fourier(mirror_unique_blocks(std::move(ks), r));
    return sol;
}

double is_riccati_solution(const Tensor3& p, const Tensor3& a, const Tensor3& b, const Tensor3& q,
                           const Tensor3& rr) {
    const Tensor3 at = ttranspose(a), bt = ttranspose(b);
    const Tensor3 pa = tprod(p, a);
    const Tensor3 btpa = tprod(bt, pa);
    const Tensor3 g = rr + tprod(bt, tprod(p, b));
    const Tensor3 rhs = tprod(at, pa) - tprod(ttranspose(btpa), tprod(tinverse(g), btpa)) + q;
    return (rhs - p).frobenius_norm() / (1.0 + p.frobenius_norm());
}

}  // namespace tpds
