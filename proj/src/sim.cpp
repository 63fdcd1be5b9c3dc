#include "tpds/sim.hpp"

#include <cmath>

#include "tpds/errors.hpp"

namespace tpds {

namespace {

constexpr double kDivergenceNorm = 1e12;

bool blown_up(const Tensor3& x) {
    const double norm = x.frobenius_norm();
    return !std::isfinite(norm) || norm > kDivergenceNorm;
}

void check_system(const Tensor3& a, const Tensor3& b, const Tensor3& x0) {
    if (a.rows() != a.cols()) throw DimensionError("A must be square in its first two modes");
    if (b.rows() != a.rows() || b.depth() != a.depth()) throw DimensionError("B does not match A");
    if (x0.rows() != a.rows() || x0.depth() != a.depth()) throw DimensionError("initial state does not match A");
}

// trace of slice 0 of x^T * w * x, i.e. trace(bcirc(x^T*w*x)) / r.
double quadratic(const Tensor3& x, const Tensor3& w) {
    const Tensor3 t = tprod(ttranspose(x), tprod(w, x));
    return t.slice(0).trace();
}

}  // namespace

Trajectory simulate(const Tensor3& a, const Tensor3& b, const Tensor3& x0, const std::vector<Tensor3>& inputs) {
    check_system(a, b, x0);
    Trajectory traj;
    traj.states.push_back(x0);
    for (const Tensor3& u : inputs) {
        if (u.rows() != b.cols() || u.cols() != x0.cols() || u.depth() != a.depth())
            throw DimensionError("input frame has wrong shape");
        Tensor3 next = tprod(a, traj.states.back()) + tprod(b, u);
        traj.inputs.push_back(u);
        const bool bad = blown_up(next);
        traj.states.push_back(std::move(next));
        if (bad) {
            traj.diverged = true;
            break;
        }
    }
    return traj;
}

Trajectory simulate_closed_loop(const Tensor3& a, const Tensor3& b, const Tensor3& k, const Tensor3& x0,
                                std::size_t steps) {
    check_system(a, b, x0);
    if (k.rows() != b.cols() || k.cols() != a.rows() || k.depth() != a.depth())
        throw DimensionError("gain does not match the system");
    Trajectory traj;
    traj.states.push_back(x0);
    for (std::size_t t = 0; t < steps; ++t) {
        Tensor3 u = tprod(k, traj.states.back());
        u *= -1.0;
        Tensor3 next = tprod(a, traj.states.back()) + tprod(b, u);
        traj.inputs.push_back(std::move(u));
        const bool bad = blown_up(next);
        traj.states.push_back(std::move(next));
        if (bad) {
            traj.diverged = true;
            break;
        }
    }
    return traj;
}

InputLaw parse_input_law(const std::string& name) {
    if (name == "uniform") return InputLaw::Uniform;
    if (name == "integer") return InputLaw::Integer;
    throw PreconditionError("unknown input law '" + name + "' (expected uniform or integer)");
}

const char* to_string(InputLaw law) { return law == InputLaw::Uniform ? "uniform" : "integer"; }

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::symmetric() { return 2.0 * uniform() - 1.0; }

int Rng::integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
}

double Rng::draw(InputLaw law) { return law == InputLaw::Uniform ? symmetric() : integer(-2, 2); }

Tensor3 Rng::tensor(std::size_t rows, std::size_t cols, std::size_t depth, InputLaw law) {
    Tensor3 t(rows, cols, depth);
    for (double& x : t.data()) x = draw(law);
    return t;
}

ExperimentData generate_experiment(const Tensor3& a, const Tensor3& b, std::size_t l, std::size_t h,
                                   std::uint64_t seed, InputLaw law) {
    if (l == 0 || h == 0) throw PreconditionError("experiment needs l >= 1 and h >= 1");
    Rng rng(seed);
    const std::size_t n = a.rows(), m = b.cols(), r = a.depth();
    const Tensor3 x0 = rng.tensor(n, h, r, law);
    std::vector<Tensor3> inputs;
    for (std::size_t t = 0; t < l; ++t) inputs.push_back(rng.tensor(m, h, r, law));
    const Trajectory traj = simulate(a, b, x0, inputs);
    if (traj.diverged) throw NumericalFailure("experiment diverged; reduce l or the open-loop gain");

    Tensor3 v(m, l * h, r), y(n, l * h, r), z(n, l * h, r);
    for (std::size_t t = 0; t < l; ++t)
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t c = 0; c < h; ++c) {
                for (std::size_t i = 0; i < m; ++i) v(i, t * h + c, k) = traj.inputs[t](i, c, k);
                for (std::size_t i = 0; i < n; ++i) {
                    y(i, t * h + c, k) = traj.states[t](i, c, k);
                    z(i, t * h + c, k) = traj.states[t + 1](i, c, k);
                }
            }
    return ExperimentData(std::move(v), std::move(y), std::move(z), l, h);
}

Cost evaluate_cost(const Trajectory& traj, const Tensor3& q, const Tensor3& rr) {
    Cost cost;
    cost.diverged = traj.diverged;
    double previous = -1.0;
    int growing = 0;
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const Tensor3& x = traj.states[t];
        if (blown_up(x)) {
            cost.diverged = true;
            break;
        }
        const double sx = quadratic(x, q);
        const double su = t < traj.inputs.size() ? quadratic(traj.inputs[t], rr) : 0.0;
        const double inc = sx + su;
        cost.state += sx;
        cost.input += su;
        ++cost.terms;
        growing = (previous >= 0.0 && inc > previous) ? growing + 1 : 0;
        if (growing >= 10) {
            cost.diverged = true;
            break;
        }
        previous = inc;
        const double acc = cost.state + cost.input;
        if (acc > 0.0 && std::abs(inc) < 1e-14 * acc) break;
    }
    cost.total = cost.diverged ? INFINITY : cost.state + cost.input;
    return cost;
}

Cost closed_loop_cost(const Tensor3& a, const Tensor3& b, const Tensor3& k, const Tensor3& x0, const Tensor3& q,
                      const Tensor3& rr, std::size_t max_steps) {
    check_system(a, b, x0);
    Cost cost;
    Tensor3 x = x0;
    double previous = -1.0;
    int growing = 0;
    for (std::size_t t = 0; t < max_steps; ++t) {
        if (blown_up(x)) {
            cost.diverged = true;
            break;
        }
        Tensor3 u = tprod(k, x);
        u *= -1.0;
        const double sx = quadratic(x, q), su = quadratic(u, rr);
        const double inc = sx + su;
        cost.state += sx;
        cost.input += su;
        ++cost.terms;
        growing = (previous >= 0.0 && inc > previous) ? growing + 1 : 0;
        if (growing >= 10) {
            cost.diverged = true;
            break;
        }
        previous = inc;
        const double acc = cost.state + cost.input;
        if (acc == 0.0 || std::abs(inc) < 1e-14 * acc) break;
        x = tprod(a, x) + tprod(b, u);
    }
    cost.total = cost.diverged ? INFINITY : cost.state + cost.input;
    return cost;
}

}  // namespace tpds
