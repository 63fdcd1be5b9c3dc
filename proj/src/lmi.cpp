#include "tpds/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tpds/errors.hpp"
#include "tpds/linalg.hpp"
#include "tpds/sdp_solver.hpp"

namespace tpds {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

double min_eigenvalue(const RealMatrix& m) {
    if (m.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

VectorXd vec(const RealMatrix& m) { return Eigen::Map<const VectorXd>(m.data(), m.size()); }

sdp::Problem build_problem(const VectorXd& b, const std::vector<AffineMatrixMap>& maps) {
    sdp::Problem p;
    p.b = b;
    for (const auto& f : maps) {
        p.c.push_back(f.base);
        p.a.push_back(-f.coefficients);
    }
    p.a_lp.resize(0, b.size());
    return p;
}

}  // namespace

AffineMatrixMap::AffineMatrixMap(RealMatrix b, RealMatrix c) : base(std::move(b)), coefficients(std::move(c)) {
    if (base.rows() != base.cols()) throw DimensionError("affine map base must be square");
    if (coefficients.rows() != base.size() && !(coefficients.size() == 0 && coefficients.rows() == 0))
        throw DimensionError("affine map coefficients must have dim^2 rows");
    if (coefficients.rows() == 0) coefficients.resize(base.size(), coefficients.cols());
}

RealMatrix AffineMatrixMap::evaluate(const VectorXd& x) const {
    if (x.size() != num_vars()) throw DimensionError("affine map: wrong number of variables");
    RealMatrix out = base;
    if (num_vars() > 0) {
        VectorXd v = coefficients * x;
        out += Eigen::Map<const RealMatrix>(v.data(), dim(), dim());
    }
    return out;
}

AffineMatrixMap AffineMatrixMap::from_function(Index num_vars,
                                               const std::function<RealMatrix(const VectorXd&)>& f) {
    VectorXd x = VectorXd::Zero(num_vars);
    RealMatrix base = f(x);
    RealMatrix coeffs(base.size(), num_vars);
    for (Index i = 0; i < num_vars; ++i) {
        x(i) = 1.0;
        RealMatrix fi = f(x);
        x(i) = 0.0;
        if (fi.rows() != base.rows() || fi.cols() != base.cols())
            throw DimensionError("affine map: inconsistent output shape");
        coeffs.col(i) = vec(fi - base);
    }
    return {std::move(base), std::move(coeffs)};
}

LinearEqualities LinearEqualities::from_function(Index num_vars,
                                                 const std::function<VectorXd(const VectorXd&)>& f) {
    VectorXd x = VectorXd::Zero(num_vars);
    VectorXd f0 = f(x);
    LinearEqualities eq;
    eq.lhs.resize(f0.size(), num_vars);
    for (Index i = 0; i < num_vars; ++i) {
        x(i) = 1.0;
        eq.lhs.col(i) = f(x) - f0;
        x(i) = 0.0;
    }
    eq.rhs = -f0;
    return eq;
}

LinearEqualities LinearEqualities::stack(const LinearEqualities& a, const LinearEqualities& b) {
    if (a.size() == 0) return b;
    if (b.size() == 0) return a;
    if (a.lhs.cols() != b.lhs.cols()) throw DimensionError("stacked equalities differ in variable count");
    LinearEqualities out;
    out.lhs.resize(a.size() + b.size(), a.lhs.cols());
    out.lhs << a.lhs, b.lhs;
    out.rhs.resize(a.size() + b.size());
    out.rhs << a.rhs, b.rhs;
    return out;
}

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::StrictlyFeasible: return "strictly_feasible";
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

RealMatrix realify(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw DimensionError("realify: matrix must be square");
    const double scale = 1.0 + h.cwiseAbs().maxCoeff();
    if (h.size() > 0 && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw PreconditionError("realify: matrix is not Hermitian");
    const Index n = h.rows();
    RealMatrix out(2 * n, 2 * n);
    RealMatrix re = 0.5 * (h.real() + h.real().transpose());
    RealMatrix im = 0.5 * (h.imag() - h.imag().transpose());
    out << re, -im, im, re;
    return out;
}

SdpSolution find_strictly_feasible(const std::vector<AffineMatrixMap>& constraints,
                                   const LinearEqualities& equalities, const FeasibilityOptions& options) {
    SdpSolution sol;
    Index n = -1;
    for (const auto& c : constraints) {
        if (n >= 0 && c.num_vars() != n) throw DimensionError("constraints disagree on variable count");
        n = c.num_vars();
    }
    if (n < 0) n = equalities.lhs.cols();
    if (equalities.size() > 0 && equalities.lhs.cols() != n)
        throw DimensionError("equalities disagree on variable count");

    // x = x0 + basis * z
    VectorXd x0 = VectorXd::Zero(n);
    RealMatrix basis = RealMatrix::Identity(n, n);
    if (equalities.size() > 0) {
        Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(equalities.lhs);
        x0 = cod.solve(equalities.rhs);
        const double residual = (equalities.lhs * x0 - equalities.rhs).norm();
        if (residual > 1e-9 * (1.0 + equalities.rhs.norm())) {
            sol.variables = x0;
            sol.status = SdpStatus::Infeasible;
            sol.certificate = -std::numeric_limits<double>::infinity();
            sol.message = "equality constraints are inconsistent";
            return sol;
        }
        basis = null_space(equalities.lhs);
    }

    std::vector<AffineMatrixMap> reduced;
    reduced.reserve(constraints.size());
    Index stacked_rows = 0;
    for (const auto& c : constraints) {
        RealMatrix base = c.evaluate(x0);
        RealMatrix coeffs = c.coefficients * basis;
        stacked_rows += coeffs.rows();
        reduced.emplace_back(std::move(base), std::move(coeffs));
    }

    // Drop directions that leave every constraint unchanged.
    RealMatrix directions = RealMatrix::Zero(basis.cols(), 0);
    if (basis.cols() > 0 && stacked_rows > 0) {
        RealMatrix stacked(stacked_rows, basis.cols());
        Index row = 0;
        for (const auto& r : reduced) {
            stacked.middleRows(row, r.coefficients.rows()) = r.coefficients;
            row += r.coefficients.rows();
        }
        Eigen::BDCSVD<RealMatrix> svd(stacked, Eigen::ComputeThinV);
        // Rank relative to the unreduced coefficients: rounding left over by the
        // equalities must not survive as a direction.
        double scale = 0.0;
        for (const auto& c : constraints) scale = std::max(scale, c.coefficients.norm());
        const int rank = numerical_rank(svd.singularValues(), stacked.rows(), stacked.cols(), scale);
        directions = svd.matrixV().leftCols(rank);
        for (auto& r : reduced) r.coefficients = r.coefficients * directions;
    }
    const Index k = directions.cols();
    const RealMatrix full_map = basis * directions;

    auto finish = [&](const VectorXd& w) {
        sol.variables = x0 + full_map * w;
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& c : constraints) {
            RealMatrix f = c.evaluate(sol.variables);
            margin = std::min(margin, min_eigenvalue(0.5 * (f + f.transpose())));
        }
        sol.certificate = margin;
        return margin;
    };

    if (k == 0) {
        const double margin = finish(VectorXd::Zero(0));
        sol.status = margin >= options.margin ? SdpStatus::StrictlyFeasible : SdpStatus::Infeasible;
        sol.message = "no free variables";
        return sol;
    }

    // Variables (w, t): maximize t s.t. F_k(w) - t I >= 0, |w_i| <= bound.
    VectorXd b = VectorXd::Zero(k + 1);
    b(k) = 1.0;
    sdp::Problem p;
    p.b = b;
    for (const auto& r : reduced) {
        p.c.push_back(r.base);
        RealMatrix a(r.coefficients.rows(), k + 1);
        a.leftCols(k) = -r.coefficients;
        a.col(k) = vec(RealMatrix::Identity(r.dim(), r.dim()));
        p.a.push_back(std::move(a));
    }
    p.c_lp = VectorXd::Constant(2 * k, options.variable_bound);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * k);
    for (Index i = 0; i < k; ++i) {
        trips.emplace_back(i, i, 1.0);
        trips.emplace_back(k + i, i, -1.0);
    }
    p.a_lp.resize(2 * k, k + 1);
    p.a_lp.setFromTriplets(trips.begin(), trips.end());

    sdp::Options opts;
    opts.max_iterations = options.max_iterations;
    opts.stop_when_bound_below = options.margin;
    const sdp::Result res = sdp::solve(p, opts);
    sol.iterations = res.iterations;
    sol.duality_gap = std::abs(res.dual_objective - res.objective);

    const VectorXd w = res.y.size() == k + 1 ? VectorXd(res.y.head(k)) : VectorXd::Zero(k);
    const double margin = finish(w);
    if (margin >= options.margin) {
        sol.status = SdpStatus::StrictlyFeasible;
        sol.message = "strictly feasible point found";
    } else if (res.status == sdp::Termination::Optimal || res.status == sdp::Termination::BoundBelowThreshold ||
               res.status == sdp::Termination::Infeasible) {
        sol.status = SdpStatus::Infeasible;
        sol.certificate = std::max(margin, res.status == sdp::Termination::Optimal ? res.objective : margin);
        sol.message = std::string("no point with margin; solver: ") + sdp::to_string(res.status);
    } else {
        sol.status = SdpStatus::NumericalFailure;
        sol.message = std::string("solver: ") + sdp::to_string(res.status) + " " + res.message;
    }
    return sol;
}

SdpSolution maximize_linear(const VectorXd& objective, const std::vector<AffineMatrixMap>& constraints,
                            int max_iterations) {
    for (const auto& c : constraints)
        if (c.num_vars() != objective.size()) throw DimensionError("constraints disagree on variable count");
    sdp::Problem p = build_problem(objective, constraints);
    sdp::Options opts;
    opts.max_iterations = max_iterations;
    const sdp::Result res = sdp::solve(p, opts);
    SdpSolution sol;
    sol.variables = res.y;
    sol.iterations = res.iterations;
    sol.certificate = res.objective;
    sol.duality_gap = std::abs(res.dual_objective - res.objective);
    sol.message = std::string(sdp::to_string(res.status)) + (res.message.empty() ? "" : ": " + res.message);
    if (res.status == sdp::Termination::Optimal) {
        sol.status = SdpStatus::Optimal;
    } else if (res.status == sdp::Termination::Infeasible) {
        sol.status = SdpStatus::Infeasible;
    } else {
        sol.status = SdpStatus::NumericalFailure;
        if (res.status == sdp::Termination::Unbounded) sol.message = "objective unbounded";
    }
    return sol;
}

HermitianBasis::HermitianBasis(Index dim, bool complex_valued) : dim_(dim), complex_(complex_valued) {
    if (dim < 0) throw DimensionError("negative basis dimension");
}

Index HermitianBasis::size() const {
    const Index off = dim_ * (dim_ - 1) / 2;
    return dim_ + off + (complex_ ? off : 0);
}

ComplexMatrix HermitianBasis::element(Index k) const {
    if (k < 0 || k >= size()) throw DimensionError("basis index out of range");
    ComplexMatrix e = ComplexMatrix::Zero(dim_, dim_);
    if (k < dim_) {
        e(k, k) = 1.0;
        return e;
    }
    k -= dim_;
    const Index off = dim_ * (dim_ - 1) / 2;
    const bool imag = k >= off;
    if (imag) k -= off;
    Index i = 0;
    while (k >= dim_ - 1 - i) {
        k -= dim_ - 1 - i;
        ++i;
    }
    const Index j = i + 1 + k;
    const std::complex<double> v = imag ? std::complex<double>(0.0, 1.0) : std::complex<double>(1.0, 0.0);
    e(i, j) = v;
    e(j, i) = std::conj(v);
    return e;
}

ComplexMatrix HermitianBasis::assemble(const VectorXd& coords) const {
    if (coords.size() != size()) throw DimensionError("coordinate vector has wrong length");
    ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
    for (Index k = 0; k < size(); ++k) out += coords(k) * element(k);
    return out;
}

TraceMaximum maximize_trace(Index p_dim, bool complex_valued,
                            const std::function<ComplexMatrix(const ComplexMatrix&)>& lhs, int max_iterations) {
    const HermitianBasis basis(p_dim, complex_valued);
    const Index nv = basis.size();
    auto embed = [&](const ComplexMatrix& h) -> RealMatrix {
        if (complex_valued) return realify(h);
        const double scale = 1.0 + (h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
        if (h.size() > 0 && h.imag().cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw PreconditionError("maximize_trace: real problem produced a complex matrix");
        RealMatrix re = h.real();
        return 0.5 * (re + re.transpose());
    };

    const ComplexMatrix l0 = lhs(ComplexMatrix::Zero(p_dim, p_dim));
    const RealMatrix neg_base = -embed(l0);
    RealMatrix neg_coeffs(neg_base.size(), nv);
    const Index pd = complex_valued ? 2 * p_dim : p_dim;
    RealMatrix p_coeffs(pd * pd, nv);
    VectorXd objective(nv);
    for (Index k = 0; k < nv; ++k) {
        const ComplexMatrix e = basis.element(k);
        neg_coeffs.col(k) = vec(-embed(lhs(e) - l0));
        p_coeffs.col(k) = vec(embed(e));
        objective(k) = e.trace().real();
    }
    std::vector<AffineMatrixMap> maps;
    maps.emplace_back(RealMatrix::Zero(pd, pd), std::move(p_coeffs));
    maps.emplace_back(neg_base, std::move(neg_coeffs));

    TraceMaximum out;
    out.solution = maximize_linear(objective, maps, max_iterations);
    if (out.solution.variables.size() == nv) out.p = basis.assemble(out.solution.variables);
    return out;
}

}  // namespace tpds
