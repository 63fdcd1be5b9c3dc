#include "tpds/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tpds::sdp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Accepted when the iterates can no longer be refined.
constexpr double kReducedTol = 1e-7;

struct Scaling {
    MatrixXd g;      // W = G G^T, G^{-1} X G^{-T} = G^T S G = diag(lambda)
    MatrixXd g_inv;
    MatrixXd w;
    VectorXd lambda;
};

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::Map<const MatrixXd> as_matrix(const MatrixXd& col_stack, Index col, Index d) {
    return {col_stack.col(col).data(), d, d};
}

// Cholesky factor or an empty matrix when m is not numerically PD.
bool cholesky(const MatrixXd& m, MatrixXd& l) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    l = llt.matrixL();
    return l.diagonal().minCoeff() > 0.0;
}

bool nt_scaling(const MatrixXd& x, const MatrixXd& s, Scaling& out) {
    MatrixXd lx, ls;
    if (!cholesky(x, lx) || !cholesky(s, ls)) {
        return false;
    }
    Eigen::JacobiSVD<MatrixXd> svd(ls.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    if (sv.minCoeff() <= 0.0) {
        return false;
    }
    const VectorXd isq = sv.cwiseSqrt().cwiseInverse();
    out.lambda = sv;
    out.g = lx * svd.matrixV() * isq.asDiagonal();
    out.g_inv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                lx.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(x.rows(), x.cols()));
    out.w = out.g * out.g.transpose();
    return true;
}

// Largest alpha with m + alpha*dm PSD (infinity when unbounded).
double max_step(const MatrixXd& m, const MatrixXd& dm) {
    MatrixXd l;
    if (!cholesky(m, l)) {
        return 0.0;
    }
    const auto tri = l.triangularView<Eigen::Lower>();
    MatrixXd t = tri.solve(dm);
    t = tri.solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    return lo >= 0.0 ? kInf : -1.0 / lo;
}

double max_step_lp(const VectorXd& v, const VectorXd& dv) {
    double a = kInf;
    for (Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) {
            a = std::min(a, -v(i) / dv(i));
        }
    }
    return a;
}

class Solver {
public:
    Solver(const Problem& p, const Options& o) : p_(p), o_(o) {
        n_ = p.num_vars();
        for (const auto& c : p.c) {
            dims_.push_back(c.rows());
        }
        nlp_ = p.c_lp.size();
        nu_ = static_cast<double>(nlp_);
        for (Index d : dims_) {
            nu_ += static_cast<double>(d);
        }
    }

    Result run();

private:
    VectorXd apply(const std::vector<MatrixXd>& x, const VectorXd& x_lp) const {
        VectorXd v = VectorXd::Zero(n_);
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const Eigen::Map<const VectorXd> vx(x[k].data(), x[k].size());
            v.noalias() += p_.a[k].transpose() * vx;
        }
        if (nlp_ > 0) {
            v += p_.a_lp.transpose() * x_lp;
        }
        return v;
    }

    MatrixXd adjoint(std::size_t k, const VectorXd& y) const {
        const VectorXd v = p_.a[k] * y;
        return Eigen::Map<const MatrixXd>(v.data(), dims_[k], dims_[k]);
    }

    void initialize();
    void residuals();
    bool build_schur();
    void direction(const std::vector<MatrixXd>& rc, const VectorXd& rc_lp, std::vector<MatrixXd>& dx,
                   VectorXd& dx_lp, VectorXd& dy, std::vector<MatrixXd>& ds, VectorXd& ds_lp) const;
    void step_lengths(const std::vector<MatrixXd>& dx, const VectorXd& dx_lp, const std::vector<MatrixXd>& ds,
                      const VectorXd& ds_lp, double& ap, double& ad) const;

    const Problem& p_;
    const Options& o_;
    Index n_ = 0;
    Index nlp_ = 0;
    double nu_ = 0.0;
    std::vector<Index> dims_;

    std::vector<MatrixXd> x_, s_;
    VectorXd y_, x_lp_, s_lp_;
    std::vector<MatrixXd> rd_;
    VectorXd rp_, rd_lp_;
    std::vector<Scaling> sc_;
    Eigen::LDLT<MatrixXd> schur_;
    double mu_ = 0.0;
};

void Solver::initialize() {
    const double bmax = p_.b.size() > 0 ? p_.b.cwiseAbs().maxCoeff() : 0.0;
    x_.clear();
    s_.clear();
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        const double d = static_cast<double>(dims_[k]);
        double amax = 0.0;
        double ratio = 0.0;
        for (Index i = 0; i < n_; ++i) {
            const double an = p_.a[k].col(i).norm();
            amax = std::max(amax, an);
            ratio = std::max(ratio, (1.0 + std::abs(p_.b(i))) / (1.0 + an));
        }
        const double xi = std::max({10.0, std::sqrt(d), d * ratio});
        const double eta = std::max({10.0, std::sqrt(d), amax, p_.c[k].norm()});
        x_.push_back(xi * MatrixXd::Identity(dims_[k], dims_[k]));
        s_.push_back(eta * MatrixXd::Identity(dims_[k], dims_[k]));
    }
    double lp_scale = 10.0;
    if (nlp_ > 0) {
        lp_scale = std::max({10.0, p_.c_lp.cwiseAbs().maxCoeff(), 1.0 + bmax});
    }
    x_lp_ = VectorXd::Constant(nlp_, lp_scale);
    s_lp_ = VectorXd::Constant(nlp_, lp_scale);
    y_ = VectorXd::Zero(n_);
}

void Solver::residuals() {
    rp_ = p_.b - apply(x_, x_lp_);
    rd_.resize(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        rd_[k] = p_.c[k] - s_[k] - adjoint(k, y_);
    }
    if (nlp_ > 0) {
        rd_lp_ = p_.c_lp - s_lp_ - p_.a_lp * y_;
    } else {
        rd_lp_.resize(0);
    }
    double comp = x_lp_.dot(s_lp_);
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        comp += (x_[k].cwiseProduct(s_[k])).sum();
    }
    mu_ = comp / nu_;
}

bool Solver::build_schur() {
    sc_.resize(dims_.size());
    MatrixXd m = MatrixXd::Zero(n_, n_);
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (!nt_scaling(x_[k], s_[k], sc_[k])) {
            return false;
        }
        const Index d = dims_[k];
        // <A_i, W A_j W> = <G^T A_i G, G^T A_j G>
        MatrixXd scaled(d * d, n_);
        for (Index i = 0; i < n_; ++i) {
            Eigen::Map<MatrixXd> out(scaled.col(i).data(), d, d);
            out.noalias() = sc_[k].g.transpose() * as_matrix(p_.a[k], i, d) * sc_[k].g;
        }
        m.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    }
    if (nlp_ > 0) {
        const VectorXd dd = x_lp_.cwiseQuotient(s_lp_);
        const Eigen::SparseMatrix<double> weighted = dd.asDiagonal() * p_.a_lp;
        m += MatrixXd(p_.a_lp.transpose() * weighted).triangularView<Eigen::Lower>().toDenseMatrix();
    }
    MatrixXd full = m.selfadjointView<Eigen::Lower>();
    m = std::move(full);
    const double diag_max = n_ > 0 ? m.diagonal().cwiseAbs().maxCoeff() : 1.0;
    m.diagonal().array() += 1e-14 * std::max(diag_max, 1.0);
    schur_.compute(m);
    return schur_.info() == Eigen::Success;
}

void Solver::direction(const std::vector<MatrixXd>& rc, const VectorXd& rc_lp, std::vector<MatrixXd>& dx,
                       VectorXd& dx_lp, VectorXd& dy, std::vector<MatrixXd>& ds, VectorXd& ds_lp) const {
    std::vector<MatrixXd> tmp(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        tmp[k] = rc[k] - sc_[k].w * rd_[k] * sc_[k].w;
    }
    VectorXd tmp_lp;
    if (nlp_ > 0) {
        tmp_lp = rc_lp - x_lp_.cwiseQuotient(s_lp_).cwiseProduct(rd_lp_);
    }
    const VectorXd h = rp_ - apply(tmp, tmp_lp);
    dy = schur_.solve(h);
    dx.resize(dims_.size());
    ds.resize(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        ds[k] = sym(rd_[k] - adjoint(k, dy));
        dx[k] = sym(rc[k] - sc_[k].w * ds[k] * sc_[k].w);
    }
    if (nlp_ > 0) {
        ds_lp = rd_lp_ - p_.a_lp * dy;
        dx_lp = rc_lp - x_lp_.cwiseQuotient(s_lp_).cwiseProduct(ds_lp);
    } else {
        ds_lp.resize(0);
        dx_lp.resize(0);
    }
}

void Solver::step_lengths(const std::vector<MatrixXd>& dx, const VectorXd& dx_lp,
                          const std::vector<MatrixXd>& ds, const VectorXd& ds_lp, double& ap,
                          double& ad) const {
    ap = kInf;
    ad = kInf;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        ap = std::min(ap, max_step(x_[k], dx[k]));
        ad = std::min(ad, max_step(s_[k], ds[k]));
    }
    if (nlp_ > 0) {
        ap = std::min(ap, max_step_lp(x_lp_, dx_lp));
        ad = std::min(ad, max_step_lp(s_lp_, ds_lp));
    }
}

Result Solver::run() {
    Result res;
    initialize();
    const double b_norm = p_.b.norm();
    double c_norm = p_.c_lp.norm();
    for (const auto& c : p_.c) {
        c_norm = std::hypot(c_norm, c.norm());
    }

    for (int it = 0; it <= o_.max_iterations; ++it) {
        residuals();
        double pobj = p_.c_lp.dot(x_lp_);
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            pobj += p_.c[k].cwiseProduct(x_[k]).sum();
        }
        const double dobj = p_.b.dot(y_);
        double rd_norm = rd_lp_.norm();
        for (const auto& r : rd_) {
            rd_norm = std::hypot(rd_norm, r.norm());
        }
        const double xinf = rp_.norm() / (1.0 + b_norm);
        const double sinf = rd_norm / (1.0 + c_norm);
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        res.iterations = it;
        res.y = y_;
        res.x = x_;
        res.x_lp = x_lp_;
        res.objective = dobj;
        res.dual_objective = pobj;
        res.primal_infeasibility = sinf;
        res.dual_infeasibility = xinf;

        if (gap <= o_.gap_tol && xinf <= o_.feas_tol && sinf <= o_.feas_tol) {
            res.status = Termination::Optimal;
            return res;
        }
        if (xinf <= o_.feas_tol && pobj < o_.stop_when_bound_below) {
            res.status = Termination::BoundBelowThreshold;
            return res;
        }
        if (sinf <= 1e-6 && dobj > o_.divergence * (1.0 + b_norm)) {
            res.status = Termination::Unbounded;
            res.message = "objective grows without bound";
            return res;
        }
        if (xinf <= 1e-6 && pobj < -o_.divergence) {
            res.status = Termination::Infeasible;
            res.message = "dual certificate of infeasibility";
            return res;
        }
        if (it == o_.max_iterations) {
            break;
        }

        if (!build_schur()) {
            if (gap <= kReducedTol && xinf <= kReducedTol && sinf <= kReducedTol) {
                res.status = Termination::Optimal;
                res.message = "stopped at reduced accuracy";
            } else {
                res.status = Termination::NumericalError;
                res.message = "loss of positive definiteness in the iterates";
            }
            return res;
        }

        // Predictor (affine scaling).
        std::vector<MatrixXd> rc(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            rc[k] = -x_[k];
        }
        VectorXd rc_lp = -x_lp_;
        std::vector<MatrixXd> dx, ds;
        VectorXd dx_lp, ds_lp, dy;
        direction(rc, rc_lp, dx, dx_lp, dy, ds, ds_lp);
        double ap = 0.0, ad = 0.0;
        step_lengths(dx, dx_lp, ds, ds_lp, ap, ad);
        ap = std::min(1.0, ap);
        ad = std::min(1.0, ad);

        double comp_aff = (x_lp_ + ap * dx_lp).dot(s_lp_ + ad * ds_lp);
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            comp_aff += ((x_[k] + ap * dx[k]).cwiseProduct(s_[k] + ad * ds[k])).sum();
        }
        const double mu_aff = comp_aff / nu_;
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu_, 3.0), 0.0, 1.0);

        // Corrector in the NT-scaled space: lambda-Lyapunov solve.
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const Scaling& sc = sc_[k];
            const MatrixXd dxs = sc.g_inv * dx[k] * sc.g_inv.transpose();
            const MatrixXd dss = sc.g.transpose() * ds[k] * sc.g;
            MatrixXd rhs = -(dxs * dss + dss * dxs);
            rhs.diagonal().array() += 2.0 * sigma * mu_;
            rhs.diagonal() -= 2.0 * sc.lambda.cwiseAbs2();
            for (Index i = 0; i < rhs.rows(); ++i) {
                for (Index j = 0; j < rhs.cols(); ++j) {
                    rhs(i, j) /= sc.lambda(i) + sc.lambda(j);
                }
            }
            rc[k] = sc.g * rhs * sc.g.transpose();
        }
        if (nlp_ > 0) {
            rc_lp = (VectorXd::Constant(nlp_, sigma * mu_) - x_lp_.cwiseProduct(s_lp_) -
                     dx_lp.cwiseProduct(ds_lp))
                        .cwiseQuotient(s_lp_);
        }
        direction(rc, rc_lp, dx, dx_lp, dy, ds, ds_lp);
        step_lengths(dx, dx_lp, ds, ds_lp, ap, ad);
        const double tau = 0.98;
        ap = std::min(1.0, tau * ap);
        ad = std::min(1.0, tau * ad);

        for (std::size_t k = 0; k < dims_.size(); ++k) {
            x_[k] = sym(x_[k] + ap * dx[k]);
            s_[k] = sym(s_[k] + ad * ds[k]);
        }
        if (nlp_ > 0) {
            x_lp_ += ap * dx_lp;
            s_lp_ += ad * ds_lp;
        }
        y_ += ad * dy;
    }
    const double gap = std::abs(res.dual_objective - res.objective) /
                       (1.0 + std::abs(res.dual_objective) + std::abs(res.objective));
    if (gap <= kReducedTol && res.primal_infeasibility <= kReducedTol && res.dual_infeasibility <= kReducedTol) {
        res.status = Termination::Optimal;
        res.message = "stopped at reduced accuracy";
    } else {
        res.status = Termination::MaxIterations;
        res.message = "iteration limit reached";
    }
    return res;
}

}  // namespace

// Positive block scaling and variable scaling leave the feasible set and the
// optimizer unchanged up to the recorded factors.
Result solve(const Problem& problem, const Options& options) {
    const Index n = problem.num_vars();
    const std::size_t blocks = problem.c.size();
    if (problem.a.size() != blocks) throw std::invalid_argument("sdp: block count mismatch");
    for (std::size_t k = 0; k < blocks; ++k) {
        const Index d = problem.c[k].rows();
        if (problem.c[k].cols() != d || problem.a[k].rows() != d * d || problem.a[k].cols() != n)
            throw std::invalid_argument("sdp: block shape mismatch");
    }
    if (problem.c_lp.size() != problem.a_lp.rows() || (problem.a_lp.rows() > 0 && problem.a_lp.cols() != n))
        throw std::invalid_argument("sdp: linear block shape mismatch");

    Problem scaled;
    std::vector<double> beta(blocks, 1.0);
    for (std::size_t k = 0; k < blocks; ++k) {
        double big = problem.c[k].norm();
        for (Index i = 0; i < n; ++i) big = std::max(big, problem.a[k].col(i).norm());
        if (big > 0.0) beta[k] = 1.0 / big;
        scaled.c.push_back(beta[k] * problem.c[k]);
        scaled.a.push_back(beta[k] * problem.a[k]);
    }
    VectorXd row_scale = VectorXd::Ones(problem.c_lp.size());
    Eigen::SparseMatrix<double, Eigen::RowMajor> a_lp = problem.a_lp;
    for (Index j = 0; j < a_lp.rows(); ++j) {
        double big = std::abs(problem.c_lp(j));
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a_lp, j); it; ++it)
            big = std::max(big, std::abs(it.value()));
        if (big > 0.0) row_scale(j) = 1.0 / big;
    }
    scaled.c_lp = row_scale.cwiseProduct(problem.c_lp);
    VectorXd gamma = VectorXd::Ones(n);
    for (Index i = 0; i < n; ++i) {
        double big = 0.0;
        for (std::size_t k = 0; k < blocks; ++k) big = std::max(big, scaled.a[k].col(i).norm());
        if (big > 0.0) gamma(i) = 1.0 / big;
    }
    for (auto& a : scaled.a) a = a * gamma.asDiagonal();
    if (problem.a_lp.rows() > 0) {
        scaled.a_lp = Eigen::SparseMatrix<double>(row_scale.asDiagonal() * problem.a_lp * gamma.asDiagonal());
    } else {
        scaled.a_lp.resize(0, n);
    }
    scaled.b = gamma.cwiseProduct(problem.b);
    const double bmax = n > 0 ? scaled.b.cwiseAbs().maxCoeff() : 0.0;
    const double delta = bmax > 0.0 ? 1.0 / bmax : 1.0;
    scaled.b *= delta;

    Options opts = options;
    opts.stop_when_bound_below = options.stop_when_bound_below * delta;
    Solver solver(scaled, opts);
    Result res = solver.run();

    res.y = gamma.cwiseProduct(res.y);
    for (std::size_t k = 0; k < res.x.size(); ++k) res.x[k] *= beta[k] / delta;
    if (res.x_lp.size() > 0) res.x_lp = row_scale.cwiseProduct(res.x_lp) / delta;
    res.objective = problem.b.dot(res.y);
    res.dual_objective /= delta;
    return res;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Optimal: return "optimal";
        case Termination::BoundBelowThreshold: return "bound-below-threshold";
        case Termination::Unbounded: return "unbounded";
        case Termination::Infeasible: return "infeasible";
        case Termination::MaxIterations: return "max-iterations";
        case Termination::NumericalError: return "numerical-error";
    }
    return "unknown";
}

}  // namespace tpds::sdp
