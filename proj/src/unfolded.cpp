#include "tpds/unfolded.hpp"

#include "tpds/errors.hpp"
#include "tpds/linalg.hpp"

namespace tpds {

namespace {

ComplexMatrix c(const RealMatrix& m) { return m.cast<std::complex<double>>(); }

}  // namespace

UnfoldedData unfold_data(const ExperimentData& d) { return {bcirc(d.v), bcirc(d.y), bcirc(d.z)}; }

bool unfolded_check_sysid(const UnfoldedData& d) {
    RealMatrix stacked(d.y.rows() + d.v.rows(), d.y.cols());
    stacked << d.y, d.v;
    return numerical_rank(stacked) == stacked.rows();
}

UnfoldedStabilization unfolded_check_stabilization(const UnfoldedData& d, const FeasibilityOptions& options) {
    StabilizationLmi lmi = solve_stabilization_lmi(c(d.y), c(d.z), false, {}, options);
    if (lmi.solution.status == SdpStatus::NumericalFailure)
        throw NumericalFailure("unfolded stabilization LMI: " + lmi.solution.message);
    UnfoldedStabilization out;
    out.verdict = lmi.solution.status == SdpStatus::StrictlyFeasible;
    out.solution = std::move(lmi.solution);
    out.s = lmi.s.real();
    return out;
}

RealMatrix unfolded_stabilizing_gain(const UnfoldedData& d, const RealMatrix& s) {
    return stabilizing_gain_block(c(d.v), c(d.y), c(s)).real();
}

UnfoldedTqr unfolded_check_tqr(const UnfoldedData& d, const RealMatrix& q, const RealMatrix& r,
                               const FeasibilityOptions& options) {
    if (q.rows() != d.y.rows() || r.rows() != d.v.rows()) throw DimensionError("unfolded weights have wrong size");
    UnfoldedTqr out;
    out.condition_i = lqr_identifiable_and_solvable(c(d.y), c(d.z), c(d.v), c(q));
    if (out.condition_i) {
        out.verdict = true;
        return out;
    }
    StabilizationLmi lmi = solve_stabilization_lmi(c(d.y), c(d.z), false, {c(d.v), c(q * d.z)}, options);
    if (lmi.solution.status == SdpStatus::NumericalFailure)
        throw NumericalFailure("unfolded TQR LMI: " + lmi.solution.message);
    out.verdict = lmi.solution.status == SdpStatus::StrictlyFeasible;
    out.solution = std::move(lmi.solution);
    return out;
}

RealMatrix unfolded_tqr_gain(const UnfoldedData& d, const RealMatrix& q, const RealMatrix& r) {
    return data_driven_lq_gain(c(d.y), c(d.z), c(d.v), c(q), c(r), false).k.real();
}

}  // namespace tpds
