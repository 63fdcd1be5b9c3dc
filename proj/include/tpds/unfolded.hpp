#pragma once

#include "tpds/informativity.hpp"
#include "tpds/lmi.hpp"
#include "tpds/tensor.hpp"

namespace tpds {

/**
 * Baseline that ignores the T-product structure: the data are unfolded into
 * the block-circulant matrices bcirc(V), bcirc(Y), bcirc(Z) of the
 * equivalent nr-dimensional linear system, and the dense matrix tests are
 * applied directly.
 */
struct UnfoldedData {
    RealMatrix v;
    RealMatrix y;
    RealMatrix z;
};

UnfoldedData unfold_data(const ExperimentData& d);

bool unfolded_check_sysid(const UnfoldedData& d);

struct UnfoldedStabilization {
    bool verdict = false;
    SdpSolution solution;
    RealMatrix s;
};
UnfoldedStabilization unfolded_check_stabilization(const UnfoldedData& d, const FeasibilityOptions& options = {});

/// -bcirc(V) S (bcirc(Y) S)^-1.
RealMatrix unfolded_stabilizing_gain(const UnfoldedData& d, const RealMatrix& s);

struct UnfoldedTqr {
    bool verdict = false;
    bool condition_i = false;
    SdpSolution solution;  // condition (ii) LMI when (i) fails
};
UnfoldedTqr unfolded_check_tqr(const UnfoldedData& d, const RealMatrix& q, const RealMatrix& r,
                               const FeasibilityOptions& options = {});

/// Dense data-driven LQ gain on the unfolded data.
RealMatrix unfolded_tqr_gain(const UnfoldedData& d, const RealMatrix& q, const RealMatrix& r);

}  // namespace tpds
