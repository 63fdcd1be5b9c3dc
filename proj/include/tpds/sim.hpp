#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tpds/informativity.hpp"
#include "tpds/tensor.hpp"

namespace tpds {

struct Trajectory {
    std::vector<Tensor3> states;  // l + 1 frames, n x h x r
    std::vector<Tensor3> inputs;  // l frames, m x h x r
    bool diverged = false;        // stopped early on a non-finite or huge state

    std::size_t length() const { return inputs.size(); }
};

/// X(t+1) = A*X(t) + B*U(t) with the given inputs.
Trajectory simulate(const Tensor3& a, const Tensor3& b, const Tensor3& x0, const std::vector<Tensor3>& inputs);

/// Closed loop with U(t) = -K*X(t); the inputs are recorded.
Trajectory simulate_closed_loop(const Tensor3& a, const Tensor3& b, const Tensor3& k, const Tensor3& x0,
                                std::size_t steps);

enum class InputLaw { Uniform, Integer };  // iid U[-1, 1], iid {-2, ..., 2}

InputLaw parse_input_law(const std::string& name);
const char* to_string(InputLaw law);

/// Deterministic random numbers: mt19937_64 with explicit mappings, so the
/// streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    double uniform();         // [0, 1)
    double symmetric();       // [-1, 1)
    int integer(int lo, int hi);  // inclusive
    double draw(InputLaw law);
    Tensor3 tensor(std::size_t rows, std::size_t cols, std::size_t depth, InputLaw law);

private:
    std::mt19937_64 engine_;
};

/// Simulates l steps from a random initial state with h columns and random
/// inputs drawn from law; returns V = [U(0) ... U(l-1)], Y = [X(0) ... X(l-1)],
/// Z = [X(1) ... X(l)].
ExperimentData generate_experiment(const Tensor3& a, const Tensor3& b, std::size_t l, std::size_t h,
                                   std::uint64_t seed, InputLaw law = InputLaw::Uniform);

struct Cost {
    double state = 0.0;
    double input = 0.0;
    double total = 0.0;
    std::size_t terms = 0;
    bool diverged = false;
};

/// Sum over the trajectory of X^T*Q*X + U^T*R*U, scalarized as
/// trace(bcirc(.)) / r, i.e. the trace of the first slice. Stops when an
/// increment falls below 1e-14 of the accumulated value; flags divergence
/// when a state norm exceeds 1e12 or increments grow 10 steps in a row.
Cost evaluate_cost(const Trajectory& traj, const Tensor3& q, const Tensor3& rr);

/// Infinite-horizon closed-loop cost, simulated until the increments vanish
/// or max_steps is reached.
Cost closed_loop_cost(const Tensor3& a, const Tensor3& b, const Tensor3& k, const Tensor3& x0, const Tensor3& q,
                      const Tensor3& rr, std::size_t max_steps = 100000);

}  // namespace tpds
