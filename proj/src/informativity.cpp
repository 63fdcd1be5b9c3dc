#include "tpds/informativity.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "tpds/errors.hpp"
#include "tpds/fourier.hpp"
#include "tpds/linalg.hpp"
#include "tpds/tqr.hpp"

namespace tpds {

using Eigen::Index;
using Eigen::VectorXd;
using cd = std::complex<double>;

namespace {

ComplexMatrix stack(const ComplexMatrix& top, const ComplexMatrix& bottom) {
    ComplexMatrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

ComplexMatrix realpart(const ComplexMatrix& m) { return m.real().cast<cd>(); }

struct DataBlocks {
    FourierBlocks v, y, z;
};

DataBlocks transform(const ExperimentData& d) { return {to_fourier(d.v), to_fourier(d.y), to_fourier(d.z)}; }

// Reference size for per-block rank tests, so a block that is pure roundoff
// counts as rank deficient.
double data_scale(const ExperimentData& d) { return std::hypot(d.y.frobenius_norm(), d.v.frobenius_norm()); }

// Block j of a real tensor's transform, with roundoff removed from
// self-conjugate blocks.
ComplexMatrix block(const FourierBlocks& fb, std::size_t j) {
    return is_self_conjugate(j, fb.depth()) ? realpart(fb.blocks[j]) : fb.blocks[j];
}

void fill_mirrors(std::vector<BlockReport>& blocks, std::size_t r) {
    const std::size_t unique = unique_block_count(r);
    blocks.resize(r);
    for (std::size_t j = unique; j < r; ++j) {
        BlockReport b = blocks[mirror_index(j, r)];
        b.j = j;
        b.mirrored = true;
        b.certificate = b.certificate.conjugate();
        blocks[j] = std::move(b);
    }
}

bool all_success(const std::vector<BlockReport>& blocks) {
    for (const auto& b : blocks)
        if (!b.success) return false;
    return true;
}

void require_gain_shape(const ComplexMatrix& m, Index rows, Index cols) {
    if (m.rows() != rows || m.cols() != cols) throw DimensionError("inconsistent block shapes");
}

}  // namespace

ExperimentData::ExperimentData(Tensor3 v_, Tensor3 y_, Tensor3 z_, std::size_t l_, std::size_t h_)
    : v(std::move(v_)), y(std::move(y_)), z(std::move(z_)), l(l_), h(h_) {
    if (y.rows() != z.rows() || y.cols() != z.cols() || y.depth() != z.depth())
        throw DimensionError("Y and Z must have the same shape");
    if (v.cols() != y.cols() || v.depth() != y.depth())
        throw DimensionError("V must have as many columns and slices as Y");
    if (y.depth() == 0 || y.rows() == 0 || y.cols() == 0) throw DimensionError("empty experiment data");
    if (l == 0 && h == 0) {
        l = y.cols();
        h = 1;
    }
    if (l * h != y.cols()) throw DimensionError("l * h must equal the number of data columns");
}

const char* to_string(Task t) {
    switch (t) {
        case Task::SystemIdentification: return "sysid";
        case Task::Stabilization: return "stabilization";
        case Task::Tqr: return "tqr";
    }
    return "unknown";
}

StabilizationLmi solve_stabilization_lmi(const ComplexMatrix& y, const ComplexMatrix& z, bool complex_valued,
                                         const std::vector<ComplexMatrix>& annihilators,
                                         const FeasibilityOptions& options) {
    const Index n = y.rows(), lh = y.cols();
    if (z.rows() != n || z.cols() != lh) throw DimensionError("Y and Z blocks differ in shape");
    for (const auto& w : annihilators)
        if (w.cols() != lh) throw DimensionError("annihilator has wrong column count");

    const Index half = lh * n;
    const Index nv = complex_valued ? 2 * half : half;
    const Index d = 2 * n;
    const Index dd = complex_valued ? 2 * d : d;
    const int parts = complex_valued ? 2 : 1;

    Index herm_rows = complex_valued ? n * n : n * (n - 1) / 2;
    Index ann_rows = 0;
    for (const auto& w : annihilators) ann_rows += w.rows() * n * parts;
    LinearEqualities eq;
    eq.lhs = RealMatrix::Zero(herm_rows + 1 + ann_rows, nv);
    eq.rhs = VectorXd::Zero(eq.lhs.rows());
    eq.rhs(herm_rows) = static_cast<double>(n);

    RealMatrix coeffs(dd * dd, nv);
    ComplexMatrix m(d, d);
    for (Index k = 0; k < nv; ++k) {
        const Index idx = k % half;
        const Index a = idx % lh, b = idx / lh;
        const cd u = k < half ? cd(1.0, 0.0) : cd(0.0, 1.0);

        // Column b of Y dS and Z dS; every other column vanishes.
        const Eigen::VectorXcd ys = u * y.col(a);
        const Eigen::VectorXcd zs = u * z.col(a);
        ComplexMatrix yS = ComplexMatrix::Zero(n, n), zS = ComplexMatrix::Zero(n, n);
        yS.col(b) = ys;
        zS.col(b) = zs;
        const ComplexMatrix herm = 0.5 * (yS + yS.adjoint());
        m << herm, zS, zS.adjoint(), herm;
        if (complex_valued) {
            const RealMatrix rm = realify(m);
            coeffs.col(k) = Eigen::Map<const VectorXd>(rm.data(), rm.size());
        } else {
            const RealMatrix rm = m.real();
            coeffs.col(k) = Eigen::Map<const VectorXd>(rm.data(), rm.size());
        }

        const ComplexMatrix skew = yS - yS.adjoint();
        Index row = 0;
        for (Index i = 0; i < n; ++i) {
            if (complex_valued) eq.lhs(row++, k) = skew(i, i).imag();
            for (Index j = i + 1; j < n; ++j) {
                eq.lhs(row++, k) = skew(i, j).real();
                if (complex_valued) eq.lhs(row++, k) = skew(i, j).imag();
            }
        }
        eq.lhs(row++, k) = yS.trace().real();
        for (const auto& w : annihilators) {
            const Eigen::VectorXcd ws = u * w.col(a);
            for (Index col = 0; col < n; ++col)
                for (Index i = 0; i < w.rows(); ++i) {
                    const cd val = col == b ? ws(i) : cd(0.0, 0.0);
                    eq.lhs(row++, k) = val.real();
                    if (complex_valued) eq.lhs(row++, k) = val.imag();
                }
        }
    }

    std::vector<AffineMatrixMap> maps;
    maps.emplace_back(RealMatrix::Zero(dd, dd), std::move(coeffs));
    StabilizationLmi out;
    out.solution = find_strictly_feasible(maps, eq, options);
    out.s = ComplexMatrix::Zero(lh, n);
    if (out.solution.variables.size() == nv) {
        for (Index k = 0; k < nv; ++k) {
            const Index idx = k % half;
            const cd u = k < half ? cd(1.0, 0.0) : cd(0.0, 1.0);
            out.s(idx % lh, idx / lh) += u * out.solution.variables(k);
        }
    }
    return out;
}

ComplexMatrix stabilizing_gain_block(const ComplexMatrix& v, const ComplexMatrix& y, const ComplexMatrix& s) {
    const ComplexMatrix ys = y * s;
    Eigen::PartialPivLU<ComplexMatrix> lu(ys);
    return -(v * s) * lu.inverse();
}

BlockModel least_squares_model(const ComplexMatrix& y, const ComplexMatrix& z, const ComplexMatrix& v) {
    const ComplexMatrix ab = z * pinv(stack(y, v));
    return {ab.leftCols(y.rows()), ab.rightCols(v.rows())};
}

bool lqr_identifiable_and_solvable(const ComplexMatrix& y, const ComplexMatrix& z, const ComplexMatrix& v,
                                   const ComplexMatrix& q, int* rank, double scale) {
    const int rk = numerical_rank(stack(y, v), scale);
    if (rank) *rank = rk;
    if (rk < y.rows() + v.rows()) return false;
    const BlockModel model = least_squares_model(y, z, v);
    return is_stabilizable_block(model.a, model.b) && is_detectable_block(q, model.a);
}

LqGainBlock data_driven_lq_gain(const ComplexMatrix& y, const ComplexMatrix& z, const ComplexMatrix& v,
                                const ComplexMatrix& q, const ComplexMatrix& r, bool complex_valued) {
    const Index n = y.rows();
    const ComplexMatrix base = -(y.adjoint() * q * y) - v.adjoint() * r * v;
    auto lhs = [&](const ComplexMatrix& p) -> ComplexMatrix {
        ComplexMatrix out = y.adjoint() * p * y - z.adjoint() * p * z + base;
        return 0.5 * (out + out.adjoint());
    };

    LqGainBlock out;
    out.program = maximize_trace(n, complex_valued, lhs);
    if (out.program.solution.status != SdpStatus::Optimal)
        throw NumericalFailure("trace maximization failed: " + out.program.solution.message);

    const ComplexMatrix l = lhs(out.program.p);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(l);
    const VectorXd ev = es.eigenvalues();
    const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    std::vector<Index> keep;
    for (Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) <= 1e-6 * scale) keep.push_back(i);
    ComplexMatrix basis(l.rows(), static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) basis.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);

    const ComplexMatrix yn = y * basis;
    if (numerical_rank(yn) < n)
        throw NumericalFailure("no right inverse of Y inside the null space of the optimal inequality");
    out.right_inverse = basis * pinv(yn);
    const double lnorm = l.norm();
    out.residual = (l * out.right_inverse).norm();
    const double inverse_error = (y * out.right_inverse - ComplexMatrix::Identity(n, n)).norm();
    if (out.residual > 1e-6 * lnorm + 1e-9 || inverse_error > 1e-8)
        throw NumericalFailure("right inverse residual " + std::to_string(out.residual) + " above tolerance");
    out.k = -v * out.right_inverse;
    return out;
}

InformativityReport check_sysid(const ExperimentData& d) {
    const DataBlocks fb = transform(d);
    InformativityReport rep;
    rep.task = Task::SystemIdentification;
    const int required = static_cast<int>(d.n() + d.m());
    for (std::size_t j = 0; j < unique_block_count(d.r()); ++j) {
        BlockReport b;
        b.j = j;
        b.required_rank = required;
        b.rank = numerical_rank(stack(block(fb.y, j), block(fb.v, j)), data_scale(d));
        b.success = b.rank == required;
        rep.blocks.push_back(std::move(b));
    }
    fill_mirrors(rep.blocks, d.r());
    rep.verdict = all_success(rep.blocks);
    return rep;
}

IdentifiedSystem identify_least_squares(const ExperimentData& d) {
    const DataBlocks fb = transform(d);
    std::vector<ComplexMatrix> as, bs;
    for (std::size_t j = 0; j < unique_block_count(d.r()); ++j) {
        BlockModel model = least_squares_model(block(fb.y, j), block(fb.z, j), block(fb.v, j));
        as.push_back(std::move(model.a));
        bs.push_back(std::move(model.b));
    }
    IdentifiedSystem sys;
    sys.a = from_fourier(mirror_unique_blocks(std::move(as), d.r()));
    sys.b = from_fourier(mirror_unique_blocks(std::move(bs), d.r()));
    const Tensor3 fit = tprod(sys.a, d.y) + tprod(sys.b, d.v);
    sys.residual = (d.z - fit).frobenius_norm() / (1.0 + d.z.frobenius_norm());
    return sys;
}

IdentifiedSystem identify(const ExperimentData& d) {
    const InformativityReport rep = check_sysid(d);
    if (!rep.verdict) {
        for (const auto& b : rep.blocks)
            if (!b.success)
                throw NotInformativeError("data are not informative for system identification: block " +
                                          std::to_string(b.j + 1) + " has rank " + std::to_string(b.rank) +
                                          " < " + std::to_string(b.required_rank));
    }
    return identify_least_squares(d);
}

InformativityReport check_stabilization(const ExperimentData& d, const FeasibilityOptions& options) {
    const DataBlocks fb = transform(d);
    InformativityReport rep;
    rep.task = Task::Stabilization;
    for (std::size_t j = 0; j < unique_block_count(d.r()); ++j) {
        const bool complex_valued = !is_self_conjugate(j, d.r());
        StabilizationLmi lmi = solve_stabilization_lmi(block(fb.y, j), block(fb.z, j), complex_valued, {}, options);
        if (lmi.solution.status == SdpStatus::NumericalFailure)
            throw NumericalFailure("stabilization LMI, Fourier block " + std::to_string(j + 1) + ": " +
                                   lmi.solution.message);
        BlockReport b;
        b.j = j;
        b.sdp_status = lmi.solution.status;
        b.margin = lmi.solution.certificate;
        b.success = lmi.solution.status == SdpStatus::StrictlyFeasible;
        if (b.success) b.certificate = std::move(lmi.s);
        b.message = lmi.solution.message;
        rep.blocks.push_back(std::move(b));
    }
    fill_mirrors(rep.blocks, d.r());
    rep.verdict = all_success(rep.blocks);
    return rep;
}

Tensor3 synth_stabilizing_gain(const ExperimentData& d, const InformativityReport& report, double* imag_residue) {
    if (report.task != Task::Stabilization || !report.verdict)
        throw PreconditionError("gain synthesis needs a positive stabilization report");
    const std::size_t unique = unique_block_count(d.r());
    if (report.blocks.size() < unique) throw PreconditionError("report lacks per-block certificates");
    const DataBlocks fb = transform(d);
    std::vector<ComplexMatrix> ks;
    for (std::size_t j = 0; j < unique; ++j) {
        const ComplexMatrix& s = report.blocks[j].certificate;
        require_gain_shape(s, static_cast<Index>(d.samples()), static_cast<Index>(d.n()));
        ks.push_back(stabilizing_gain_block(block(fb.v, j), block(fb.y, j), s));
    }
    return from_fourier(mirror_unique_blocks(std::move(ks), d.r()), imag_residue);
}

InformativityReport check_tqr(const ExperimentData& d, const Tensor3& q, const Tensor3& rr,
                              const FeasibilityOptions& options) {
    validate_weights(q, rr, d.n(), d.m(), d.r());
    const DataBlocks fb = transform(d);
    const FourierBlocks fq = to_fourier(q);
    InformativityReport rep;
    rep.task = Task::Tqr;
    for (std::size_t j = 0; j < unique_block_count(d.r()); ++j) {
        const bool complex_valued = !is_self_conjugate(j, d.r());
        const ComplexMatrix y = block(fb.y, j), z = block(fb.z, j), v = block(fb.v, j);
        const ComplexMatrix qj = block(fq, j);
        BlockReport b;
        b.j = j;
        b.required_rank = static_cast<int>(d.n() + d.m());
        if (lqr_identifiable_and_solvable(y, z, v, qj, &b.rank, data_scale(d))) {
            b.success = true;
            b.condition = "i";
        } else {
            StabilizationLmi lmi = solve_stabilization_lmi(y, z, complex_valued, {v, ComplexMatrix(qj * z)}, options);
            if (lmi.solution.status == SdpStatus::NumericalFailure)
                throw NumericalFailure("TQR condition (ii) LMI, Fourier block " + std::to_string(j + 1) + ": " +
                                       lmi.solution.message);
            b.sdp_status = lmi.solution.status;
            b.margin = lmi.solution.certificate;
            b.success = lmi.solution.status == SdpStatus::StrictlyFeasible;
            if (b.success) {
                b.condition = "ii";
                b.certificate = std::move(lmi.s);
            }
            b.message = lmi.solution.message;
        }
        rep.blocks.push_back(std::move(b));
    }
    fill_mirrors(rep.blocks, d.r());
    rep.verdict = all_success(rep.blocks);
    return rep;
}

Tensor3 synth_tqr_gain(const ExperimentData& d, const Tensor3& q, const Tensor3& rr, double* imag_residue) {
    const InformativityReport rep = check_tqr(d, q, rr);
    if (!rep.verdict) throw NotInformativeError("data are not informative for TQR");
    const DataBlocks fb = transform(d);
    const FourierBlocks fq = to_fourier(q), fr = to_fourier(rr);
    std::vector<ComplexMatrix> ks;
    for (std::size_t j = 0; j < unique_block_count(d.r()); ++j) {
        const bool complex_valued = !is_self_conjugate(j, d.r());
        const ComplexMatrix qj = block(fq, j), rj = block(fr, j);
        try {
            LqGainBlock g = data_driven_lq_gain(block(fb.y, j), block(fb.z, j), block(fb.v, j),
                                                0.5 * (qj + qj.adjoint()), 0.5 * (rj + rj.adjoint()),
                                                complex_valued);
            ks.push_back(std::move(g.k));
        } catch (const NumericalFailure& e) {
            throw NumericalFailure("Fourier block " + std::to_string(j + 1) + ": " + e.what());
        }
    }
    return from_fourier(mirror_unique_blocks(std::move(ks), d.r()), imag_residue);
}

}  // namespace tpds
