#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "tpds/errors.hpp"
#include "tpds/fourier.hpp"
#include "tpds/linalg.hpp"
#include "tpds/sim.hpp"
#include "tpds/spectral.hpp"
#include "tpds/tqr.hpp"

using namespace tpds;
using cd = std::complex<double>;

namespace {

ComplexMatrix scalar(double x) { return ComplexMatrix::Constant(1, 1, x); }

ComplexMatrix random_complex(tpds::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * cd(rng.symmetric(), rng.symmetric());
    return m;
}

}  // namespace

TEST_CASE("stabilizability examples", "[tqr]") {
    tpds::Rng rng(61);
    const Tensor3 a = oracle::random_tensor(rng, 2, 2, 3, 3.0);
    CHECK(is_stabilizable(a, Tensor3::identity(2, 3)));
    CHECK_FALSE(is_stabilizable(2.0 * Tensor3::identity(2, 3), Tensor3(2, 1, 3)));
    CHECK(is_stabilizable(0.5 * Tensor3::identity(2, 3), Tensor3(2, 1, 3)));
}

TEST_CASE("stabilizability agrees with the dense PBH test", "[tqr][property]") {
    tpds::Rng rng(62);
    int positive = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 2), r = 1 + rng.integer(0, 3);
        const oracle::System sys = oracle::random_system(rng, n, 1, r, 1.4);
        Tensor3 b = sys.b;
        // zero the input on every frequency but the mean
        if (trial % 3 == 0) {
            const RealMatrix mean = b.slice(0);
            for (std::size_t k = 0; k < r; ++k) b.set_slice(k, mean);
        }
        if (trial % 5 == 0) b = Tensor3(n, 1, r);
        const bool verdict = is_stabilizable(sys.a, b);
        CHECK(verdict == oracle::stabilizable(bcirc(sys.a), bcirc(b)));
        positive += verdict;
    }
    CHECK(positive > 10);
    CHECK(positive < 90);
}

TEST_CASE("detectability", "[tqr]") {
    tpds::Rng rng(63);
    CHECK(is_detectable(Tensor3::identity(2, 3), oracle::random_tensor(rng, 2, 2, 3, 4.0)));
    CHECK_FALSE(is_detectable(Tensor3(2, 2, 3), 2.0 * Tensor3::identity(2, 3)));
    int positive = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 2), r = 1 + rng.integer(0, 3);
        const Tensor3 a = oracle::random_system(rng, n, 1, r, 1.4).a;
        const Tensor3 c = oracle::random_tensor(rng, 1, n, r);
        const Tensor3 q = trial % 4 == 0 ? Tensor3(n, n, r) : tprod(ttranspose(c), c);
        const bool verdict = is_detectable(q, a);
        CHECK(verdict == oracle::stabilizable(bcirc(a).transpose(), bcirc(q).transpose()));
        positive += verdict;
    }
    CHECK(positive > 10);
    CHECK(positive < 90);
}

TEST_CASE("scalar Riccati equation", "[tqr]") {
    const double a = 0.5, b = 1.0, q = 1.0, r = 1.0;
    const ComplexMatrix p = solve_dare_block(scalar(a), scalar(b), scalar(q), scalar(r));
    const auto f = [&](double x) { return a * a * x - a * a * b * b * x * x / (r + b * b * x) + q - x; };
    const double root = oracle::bisect(f, 0.0, 100.0);
    CHECK(std::abs(p(0, 0).real() - root) < 1e-12);
    CHECK(std::abs(f(p(0, 0).real())) < 1e-12);
    CHECK(dare_residual_block(scalar(a), scalar(b), scalar(q), scalar(r), p) < 1e-12);
}

TEST_CASE("dead-beat blocks have P = Q", "[tqr]") {
    tpds::Rng rng(64);
    const ComplexMatrix b = random_complex(rng, 3, 2, 1.0);
    ComplexMatrix q = random_complex(rng, 3, 3, 1.0);
    q = q * q.adjoint();
    const ComplexMatrix p = solve_dare_block(ComplexMatrix::Zero(3, 3), b, q, ComplexMatrix::Identity(2, 2));
    CHECK((p - q).norm() < 1e-12 * (1.0 + q.norm()));
}

TEST_CASE("complex blocks: residual and independence from the start", "[tqr]") {
    tpds::Rng rng(65);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = random_complex(rng, 3, 3, 0.8);
        const ComplexMatrix b = random_complex(rng, 3, 2, 1.0);
        const ComplexMatrix q = ComplexMatrix::Identity(3, 3);
        const ComplexMatrix r = ComplexMatrix::Identity(2, 2);
        const ComplexMatrix p1 = solve_dare_block(a, b, q, r);
        DareOptions opts;
        opts.initial = q + ComplexMatrix::Identity(3, 3);
        const ComplexMatrix p2 = solve_dare_block(a, b, q, r, opts);
        CHECK(dare_residual_block(a, b, q, r, p1) <= 1e-10);
        CHECK((p1 - p2).norm() <= 1e-8 * (1.0 + p1.norm()));
        CHECK((p1 - p1.adjoint()).norm() <= 1e-12 * p1.norm());
        const ComplexMatrix k = lqr_gain_block(a, b, r, p1);
        CHECK(spectral_radius(ComplexMatrix(a - b * k)) < 1.0);
    }
}

TEST_CASE("depth one is ordinary LQR", "[tqr]") {
    tpds::Rng rng(66);
    const oracle::System sys = oracle::random_system(rng, 3, 2, 1, 1.3);
    const Tensor3 q = Tensor3::identity(3, 1), rr = Tensor3::identity(2, 1);
    const TqrSolution s = solve_tqr(sys.a, sys.b, q, rr);
    const RealMatrix a = sys.a.slice(0), b = sys.b.slice(0);
    const RealMatrix p = oracle::dare_sda(a, b, q.slice(0), rr.slice(0));
    const RealMatrix k = oracle::lqr_gain(a, b, rr.slice(0), p);
    CHECK((s.k.slice(0) - k).norm() <= 1e-9 * (1.0 + k.norm()));
    CHECK((s.p.slice(0) - p).norm() <= 1e-9 * (1.0 + p.norm()));
}

TEST_CASE("TQR gain equals the dense LQR gain of the unfolded system", "[tqr][property]") {
    tpds::Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 2), m = 1 + rng.integer(0, 1), r = 1 + rng.integer(0, 3);
        const oracle::System sys = oracle::random_system(rng, n, m, r, 1.3);
        if (!is_stabilizable(sys.a, sys.b)) continue;
        const Tensor3 q = oracle::random_tpd(rng, n, r, 0.2), rr = oracle::random_tpd(rng, m, r, 0.5);
        const TqrSolution s = solve_tqr(sys.a, sys.b, q, rr);
        const RealMatrix p = oracle::dare_sda(bcirc(sys.a), bcirc(sys.b), bcirc(q), bcirc(rr));
        const RealMatrix k = oracle::lqr_gain(bcirc(sys.a), bcirc(sys.b), bcirc(rr), p);
        CHECK((bcirc(s.k) - k).norm() <= 1e-7 * (1.0 + k.norm()));

        CHECK(max_abs_diff(ttranspose(s.p), s.p) <= 1e-8);
        CHECK(is_tpsd(s.p));
        CHECK(max_eigentuple_modulus(sys.a - tprod(sys.b, s.k)) < 1.0);
        for (double rho : s.closed_loop_radii) CHECK(rho < 1.0);
        CHECK(is_riccati_solution(s.p, sys.a, sys.b, q, rr) <= 1e-8);
    }
}

TEST_CASE("the three-state, two-input, depth-four example", "[tqr]") {
    tpds::Rng rng(68);
    const oracle::System sys = oracle::random_system(rng, 3, 2, 4, 1.3);
    REQUIRE(is_stabilizable(sys.a, sys.b));
    const Tensor3 q = Tensor3::identity(3, 4), rr = Tensor3::identity(2, 4);
    const TqrSolution s = solve_tqr(sys.a, sys.b, q, rr);
    const RealMatrix p = oracle::dare_sda(bcirc(sys.a), bcirc(sys.b), bcirc(q), bcirc(rr));
    const RealMatrix k = oracle::lqr_gain(bcirc(sys.a), bcirc(sys.b), bcirc(rr), p);
    CHECK((bcirc(s.k) - k).norm() <= 1e-7 * (1.0 + k.norm()));
}

TEST_CASE("dead-beat TQR", "[tqr]") {
    tpds::Rng rng(69);
    const Tensor3 b = oracle::random_tensor(rng, 2, 1, 3);
    const TqrSolution s = solve_tqr(Tensor3(2, 2, 3), b, Tensor3::identity(2, 3), Tensor3::identity(1, 3));
    CHECK(s.k.max_abs() < 1e-12);
    CHECK(max_abs_diff(s.p, Tensor3::identity(2, 3)) < 1e-12);
}

TEST_CASE("TQR preconditions", "[tqr]") {
    CHECK_THROWS_AS(solve_tqr(2.0 * Tensor3::identity(2, 2), Tensor3(2, 1, 2), Tensor3::identity(2, 2),
                              Tensor3::identity(1, 2)),
                    PreconditionError);
    CHECK_THROWS_AS(solve_tqr(2.0 * Tensor3::identity(2, 2), Tensor3::identity(2, 2), Tensor3(2, 2, 2),
                              Tensor3::identity(2, 2)),
                    PreconditionError);
    CHECK_THROWS_AS(validate_weights(Tensor3::identity(2, 2), Tensor3::identity(1, 3), 2, 1, 2), DimensionError);
}

TEST_CASE("Riccati residual", "[tqr]") {
    tpds::Rng rng(70);
    const oracle::System sys = oracle::random_system(rng, 3, 2, 4, 1.2);
    const Tensor3 q = Tensor3::identity(3, 4), rr = Tensor3::identity(2, 4);
    CHECK(std::abs(is_riccati_solution(Tensor3(3, 3, 4), sys.a, sys.b, q, rr) - std::sqrt(3.0)) < 1e-12);

    const TqrSolution s = solve_tqr(sys.a, sys.b, q, rr);
    CHECK(is_riccati_solution(s.p, sys.a, sys.b, q, rr) <= 1e-8);
    const double perturbed = is_riccati_solution(s.p + 1e-3 * Tensor3::identity(3, 4), sys.a, sys.b, q, rr);
    CHECK(perturbed > 1e-5);
    CHECK(perturbed < 1e-1);
}

TEST_CASE("the TQR gain minimizes the simulated cost", "[tqr][property]") {
    tpds::Rng rng(71);
    const std::size_t n = 2, m = 1, r = 3;
    const oracle::System sys = oracle::random_system(rng, n, m, r, 1.2);
    REQUIRE(is_stabilizable(sys.a, sys.b));
    const Tensor3 q = Tensor3::identity(n, r), rr = Tensor3::identity(m, r);
    const TqrSolution s = solve_tqr(sys.a, sys.b, q, rr);
    int compared = 0;
    for (int trial = 0; trial < 200 && compared < 20; ++trial) {
        const Tensor3 k = s.k + oracle::random_tensor(rng, m, n, r, 0.2);
        if (max_eigentuple_modulus(sys.a - tprod(sys.b, k)) > 0.98) continue;
        const Tensor3 x0 = oracle::random_tensor(rng, n, 1, r);
        const Cost opt = closed_loop_cost(sys.a, sys.b, s.k, x0, q, rr);
        const Cost other = closed_loop_cost(sys.a, sys.b, k, x0, q, rr);
        REQUIRE_FALSE(opt.diverged);
        REQUIRE_FALSE(other.diverged);
        CHECK(opt.total <= other.total * (1.0 + 1e-8));
        // value function: J = trace of the first slice of X0^T * P * X0
        const double value = tprod(ttranspose(x0), tprod(s.p, x0))(0, 0, 0);
        CHECK(std::abs(opt.total - value) <= 1e-9 * (1.0 + value));
        ++compared;
    }
    CHECK(compared == 20);
}
