#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tpds/lmi.hpp"
#include "tpds/tensor.hpp"

namespace tpds {

/**
 * Input/state data of one experiment: v is m x lh x r, y and z are
 * n x lh x r with z holding the successor of every column of y.
 * l and h record how the lh columns split into samples and trajectories;
 * they default to l = lh, h = 1.
 */
struct ExperimentData {
    Tensor3 v;
    Tensor3 y;
    Tensor3 z;
    std::size_t l = 0;
    std::size_t h = 0;

    ExperimentData() = default;
    ExperimentData(Tensor3 v, Tensor3 y, Tensor3 z, std::size_t l = 0, std::size_t h = 0);

    std::size_t n() const { return y.rows(); }
    std::size_t m() const { return v.rows(); }
    std::size_t r() const { return y.depth(); }
    std::size_t samples() const { return y.cols(); }
};

enum class Task { SystemIdentification, Stabilization, Tqr };

const char* to_string(Task t);

struct BlockReport {
    std::size_t j = 0;  // 0-based Fourier block index
    bool mirrored = false;  // copied from the conjugate partner
    bool success = false;
    int rank = -1;
    int required_rank = -1;
    std::string condition;  // TQR: "i", "ii" or empty
    std::optional<SdpStatus> sdp_status;
    double margin = 0.0;
    ComplexMatrix certificate;  // S_j
    std::string message;
};

struct InformativityReport {
    Task task = Task::SystemIdentification;
    bool verdict = false;
    std::vector<BlockReport> blocks;
    std::optional<Tensor3> gain;
};

// ---- Block-level primitives, shared with the unfolded baseline ----------

/// Feasible S for: Y S Hermitian, trace(Y S) = rows(Y), W S = 0 for every
/// annihilator W, and [[Y S, Z S], [(Z S)^H, Y S]] > 0. With
/// complex_valued = false the blocks are treated as real.
struct StabilizationLmi {
    SdpSolution solution;
    ComplexMatrix s;
};
StabilizationLmi solve_stabilization_lmi(const ComplexMatrix& y, const ComplexMatrix& z, bool complex_valued,
                                         const std::vector<ComplexMatrix>& annihilators = {},
                                         const FeasibilityOptions& options = {});

/// -V S (Y S)^-1, the gain of the law u = -K x.
ComplexMatrix stabilizing_gain_block(const ComplexMatrix& v, const ComplexMatrix& y, const ComplexMatrix& s);

/// Minimum-norm least-squares [A B] with Z = A Y + B V.
struct BlockModel {
    ComplexMatrix a;
    ComplexMatrix b;
};
BlockModel least_squares_model(const ComplexMatrix& y, const ComplexMatrix& z, const ComplexMatrix& v);

/// Condition (i) of the LQR informativity test: [Y; V] full row rank and the
/// unique consistent model stabilizable with (Q, A) detectable. A positive
/// scale sets the reference size for the rank test.
bool lqr_identifiable_and_solvable(const ComplexMatrix& y, const ComplexMatrix& z, const ComplexMatrix& v,
                                   const ComplexMatrix& q, int* rank = nullptr, double scale = 0.0);

/// Data-driven LQ gain: maximize trace(P) s.t. P >= 0 and
/// Y^H P Y - Z^H P Z - Y^H Q Y - V^H R V <= 0, then K = -V Y_dag with Y_dag a
/// right inverse of Y annihilated by that matrix at the optimum.
struct LqGainBlock {
    TraceMaximum program;
    ComplexMatrix right_inverse;
    ComplexMatrix k;
    double residual = 0.0;
};
LqGainBlock data_driven_lq_gain(const ComplexMatrix& y, const ComplexMatrix& z, const ComplexMatrix& v,
                                const ComplexMatrix& q, const ComplexMatrix& r, bool complex_valued);

// ---- Tensor-level operations, Fourier-decoupled ---------------------------

InformativityReport check_sysid(const ExperimentData& d);

struct IdentifiedSystem {
    Tensor3 a;
    Tensor3 b;
    double residual = 0.0;  // ||Z - A*Y - B*V||_F / (1 + ||Z||_F)
};

/// Exact identification; throws NotInformativeError unless check_sysid holds.
IdentifiedSystem identify(const ExperimentData& d);
/// Minimum-norm least-squares fit per Fourier block; never throws on rank.
IdentifiedSystem identify_least_squares(const ExperimentData& d);

InformativityReport check_stabilization(const ExperimentData& d, const FeasibilityOptions& options = {});

/// Assembles K from the certificates of a positive stabilization report.
/// Throws PreconditionError when the report is negative or incomplete.
Tensor3 synth_stabilizing_gain(const ExperimentData& d, const InformativityReport& report,
                               double* imag_residue = nullptr);

/// Weights must satisfy validate_weights.
InformativityReport check_tqr(const ExperimentData& d, const Tensor3& q, const Tensor3& rr,
                              const FeasibilityOptions& options = {});

/// Throws NotInformativeError when the data are not informative for TQR and
/// NumericalFailure when no admissible right inverse is found.
Tensor3 synth_tqr_gain(const ExperimentData& d, const Tensor3& q, const Tensor3& rr,
                       double* imag_residue = nullptr);

}  // namespace tpds
