#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "tpds/errors.hpp"
#include "tpds/fourier.hpp"
#include "tpds/informativity.hpp"
#include "tpds/json_io.hpp"
#include "tpds/sim.hpp"
#include "tpds/spectral.hpp"
#include "tpds/tqr.hpp"
#include "tpds/unfolded.hpp"

using namespace tpds;

namespace {

ExperimentData example() {
    return io::data_from_json(io::read_json_file(TPDS_TEST_DATA_DIR "/stabilization_example.json"));
}

Tensor3 example_gain() { return io::read_tensor_file(TPDS_TEST_DATA_DIR "/stabilization_example_gain.json"); }

double closed_loop_modulus(const Tensor3& a, const Tensor3& b, const Tensor3& k) {
    return max_eigentuple_modulus(a - tprod(b, k));
}

bool dense_sysid(const ExperimentData& d) {
    RealMatrix stacked(d.n() * d.r() + d.m() * d.r(), d.samples() * d.r());
    stacked << bcirc(d.y), bcirc(d.v);
    return oracle::rank(stacked) == static_cast<int>((d.n() + d.m()) * d.r());
}

}  // namespace

TEST_CASE("experiment data validate their shapes", "[informativity]") {
    CHECK_THROWS_AS(ExperimentData(Tensor3(1, 4, 2), Tensor3(2, 4, 2), Tensor3(2, 3, 2)), DimensionError);
    CHECK_THROWS_AS(ExperimentData(Tensor3(1, 3, 2), Tensor3(2, 4, 2), Tensor3(2, 4, 2)), DimensionError);
    CHECK_THROWS_AS(ExperimentData(Tensor3(1, 4, 2), Tensor3(2, 4, 2), Tensor3(2, 4, 2), 3, 1), DimensionError);
    const ExperimentData d(Tensor3(1, 4, 2), Tensor3(2, 4, 2), Tensor3(2, 4, 2));
    CHECK(d.l == 4);
    CHECK(d.h == 1);
}

TEST_CASE("system identification needs n + m samples", "[informativity]") {
    tpds::Rng rng(41);
    const ExperimentData d(oracle::random_tensor(rng, 2, 3, 2), oracle::random_tensor(rng, 2, 3, 2),
                           oracle::random_tensor(rng, 2, 3, 2));
    const InformativityReport rep = check_sysid(d);
    CHECK_FALSE(rep.verdict);
    REQUIRE(rep.blocks.size() == 2);
    CHECK(rep.blocks[0].required_rank == 4);
    CHECK(rep.blocks[0].rank <= 3);
}

TEST_CASE("zero inputs defeat system identification", "[informativity]") {
    Tensor3 y(2, 4, 3);
    y.set_slice(0, (RealMatrix(2, 4) << 1, 0, 1, 2, 0, 1, -1, 3).finished());
    const ExperimentData d(Tensor3(1, 4, 3), y, y);
    CHECK_FALSE(check_sysid(d).verdict);
    CHECK_THROWS_AS(identify(d), NotInformativeError);
    CHECK_FALSE(check_sysid(ExperimentData(Tensor3(1, 4, 3), Tensor3(2, 4, 3), Tensor3(2, 4, 3))).verdict);
}

TEST_CASE("sysid verdicts match the dense rank test", "[informativity][property]") {
    tpds::Rng rng(42);
    int positive = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 2), m = 1 + rng.integer(0, 2), r = 1 + rng.integer(0, 2);
        const std::size_t l = 1 + rng.integer(0, 2), h = 1 + rng.integer(0, 2);
        Tensor3 v = oracle::random_tensor(rng, m, l * h, r);
        // constant tubes leave the non-zero frequencies empty
        if (trial % 4 == 0)
            for (std::size_t k = 1; k < r; ++k) v.set_slice(k, v.slice(0));
        const ExperimentData d(v, oracle::random_tensor(rng, n, l * h, r), oracle::random_tensor(rng, n, l * h, r), l, h);
        const bool verdict = check_sysid(d).verdict;
        CHECK(verdict == dense_sysid(d));
        CHECK(verdict == unfolded_check_sysid(unfold_data(d)));
        positive += verdict;
    }
    CHECK(positive > 10);
    CHECK(positive < 90);
}

TEST_CASE("identification recovers the generating system", "[informativity]") {
    tpds::Rng rng(43);
    const oracle::System sys = oracle::random_system(rng, 3, 2, 4, 0.9);
    const ExperimentData d = generate_experiment(sys.a, sys.b, 4, 2, 7);
    REQUIRE(check_sysid(d).verdict);
    const IdentifiedSystem id = identify(d);
    CHECK(max_abs_diff(id.a, sys.a) < 1e-8);
    CHECK(max_abs_diff(id.b, sys.b) < 1e-8);
    CHECK(id.residual < 1e-12);
    const Tensor3 recon = tprod(id.a, d.y) + tprod(id.b, d.v);
    CHECK((recon - d.z).frobenius_norm() <= 1e-8 * d.z.frobenius_norm());
}

TEST_CASE("identity dynamics are identified", "[informativity]") {
    tpds::Rng rng(44);
    const Tensor3 y = oracle::random_tensor(rng, 2, 5, 3);
    const ExperimentData d(oracle::random_tensor(rng, 1, 5, 3), y, y);
    const IdentifiedSystem id = identify(d);
    CHECK(max_abs_diff(id.a, Tensor3::identity(2, 3)) < 1e-10);
    CHECK(id.b.max_abs() < 1e-10);
}

TEST_CASE("the worked stabilization example", "[informativity]") {
    const ExperimentData d = example();
    REQUIRE(d.n() == 2);
    REQUIRE(d.m() == 2);
    REQUIRE(d.r() == 2);
    REQUIRE(d.samples() == 6);

    const InformativityReport rep = check_stabilization(d);
    REQUIRE(rep.verdict);
    REQUIRE(rep.blocks.size() == 2);
    for (const auto& b : rep.blocks) {
        CHECK(b.success);
        CHECK(b.sdp_status == SdpStatus::StrictlyFeasible);
        CHECK(b.margin >= 1e-6);
    }

    double residue = 1.0;
    const Tensor3 k = synth_stabilizing_gain(d, rep, &residue);
    CHECK(residue <= 1e-9);

    // no TPDS reproduces these data exactly, so the gains are checked against
    // the least-squares pair
    CHECK_FALSE(check_sysid(d).verdict);
    const IdentifiedSystem ls = identify_least_squares(d);
    CHECK(ls.residual > 1e-3);
    CHECK(max_eigentuple_modulus(ls.a) > 1.0);
    CHECK(closed_loop_modulus(ls.a, ls.b, k) < 1.0 - 1e-6);

    // the printed gain is written for the law u = +K x
    const Tensor3 printed = example_gain();
    CHECK(closed_loop_modulus(ls.a, ls.b, -1.0 * printed) < 1.0 - 1e-6);
    CHECK(is_stable(ls.a + tprod(ls.b, printed)));
}

TEST_CASE("an unstabilizable consistent system defeats stabilization", "[informativity]") {
    tpds::Rng rng(45);
    const Tensor3 y = oracle::random_tensor(rng, 2, 4, 3);
    const ExperimentData d(Tensor3(1, 4, 3), y, 2.0 * y);
    const InformativityReport rep = check_stabilization(d);
    CHECK_FALSE(rep.verdict);
    for (const auto& b : rep.blocks) CHECK_FALSE(b.success);
    CHECK_THROWS_AS(synth_stabilizing_gain(d, rep), PreconditionError);
}

TEST_CASE("mirrored blocks carry conjugate certificates", "[informativity]") {
    tpds::Rng rng(46);
    const oracle::System sys = oracle::random_system(rng, 2, 1, 5, 0.9);
    const ExperimentData d = generate_experiment(sys.a, sys.b, 5, 1, 3);
    const InformativityReport rep = check_stabilization(d);
    REQUIRE(rep.blocks.size() == 5);
    for (std::size_t j = 1; j < 5; ++j) {
        const auto& b = rep.blocks[j];
        const auto& partner = rep.blocks[5 - j];
        CHECK(b.mirrored == (j > 2));
        CHECK((b.certificate - partner.certificate.conjugate()).norm() < 1e-14);
    }
    bool all = true;
    for (const auto& b : rep.blocks) all = all && b.success;
    CHECK(rep.verdict == all);
}

TEST_CASE("stabilization verdicts match the unfolded LMI", "[informativity][property]") {
    tpds::Rng rng(47);
    int positive = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 1), m = 1, r = 1 + rng.integer(0, 2);
        const std::size_t lh = n + m + rng.integer(0, 2);
        const oracle::System sys = oracle::random_system(rng, n, m, r, 0.6 + 0.8 * rng.uniform());
        ExperimentData d = generate_experiment(sys.a, sys.b, lh, 1, 100 + trial);
        if (trial % 3 == 0) d = ExperimentData(Tensor3(m, lh, r), d.y, tprod(sys.a, d.y));
        const bool verdict = check_stabilization(d).verdict;
        CHECK(verdict == unfolded_check_stabilization(unfold_data(d)).verdict);
        positive += verdict;
    }
    CHECK(positive > 3);
    CHECK(positive < 27);
}

TEST_CASE("synthesized gains stabilize the generating system", "[informativity][property]") {
    tpds::Rng rng(48);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 2), m = 1 + rng.integer(0, 1), r = 1 + rng.integer(0, 3);
        const oracle::System sys = oracle::random_system(rng, n, m, r, 1.5);
        const ExperimentData d = generate_experiment(sys.a, sys.b, n + m + 1, 1, 200 + trial);
        const InformativityReport rep = check_stabilization(d);
        if (!rep.verdict) {
            CHECK_FALSE(is_stabilizable(sys.a, sys.b));
            continue;
        }
        double residue = 1.0;
        const Tensor3 k = synth_stabilizing_gain(d, rep, &residue);
        CHECK(residue <= 1e-9);
        CHECK(closed_loop_modulus(sys.a, sys.b, k) < 1.0 - 1e-6);
    }
}

TEST_CASE("depth one matches the dense data-driven gain", "[informativity]") {
    tpds::Rng rng(49);
    const oracle::System sys = oracle::random_system(rng, 3, 2, 1, 1.4);
    const ExperimentData d = generate_experiment(sys.a, sys.b, 7, 1, 9);
    const InformativityReport rep = check_stabilization(d);
    REQUIRE(rep.verdict);
    const Tensor3 k = synth_stabilizing_gain(d, rep);
    const UnfoldedData u = unfold_data(d);
    const UnfoldedStabilization dense = unfolded_check_stabilization(u);
    REQUIRE(dense.verdict);
    const RealMatrix kd = unfolded_stabilizing_gain(u, dense.s);
    CHECK(oracle::spectral_radius(sys.a.slice(0) - sys.b.slice(0) * k.slice(0)) < 1.0);
    CHECK(oracle::spectral_radius(sys.a.slice(0) - sys.b.slice(0) * kd) < 1.0);
}

TEST_CASE("zero inputs on a stable system give the zero gain", "[informativity]") {
    tpds::Rng rng(50);
    const Tensor3 a = oracle::random_system(rng, 2, 1, 3, 0.5).a;
    REQUIRE(is_stable(a));
    const Tensor3 y = oracle::random_tensor(rng, 2, 3, 3);
    const ExperimentData d(Tensor3(1, 3, 3), y, tprod(a, y));
    const InformativityReport rep = check_stabilization(d);
    REQUIRE(rep.verdict);
    const Tensor3 k = synth_stabilizing_gain(d, rep);
    CHECK(k.max_abs() < 1e-12);
    CHECK(is_stable(a - tprod(Tensor3(2, 1, 3), k)));
}

TEST_CASE("TQR informativity through identifiable data", "[informativity]") {
    tpds::Rng rng(51);
    const oracle::System sys = oracle::random_system(rng, 2, 2, 3, 1.3);
    REQUIRE(oracle::stabilizable(bcirc(sys.a), bcirc(sys.b)));
    const ExperimentData d = generate_experiment(sys.a, sys.b, 5, 1, 11);
    const Tensor3 q = Tensor3::identity(2, 3), rr = Tensor3::identity(2, 3);
    const InformativityReport rep = check_tqr(d, q, rr);
    REQUIRE(rep.verdict);
    for (const auto& b : rep.blocks) CHECK(b.condition == "i");
}

TEST_CASE("an uncontrollable unstable mode defeats TQR", "[informativity]") {
    RealMatrix a(2, 2), b(2, 1);
    a << 2.0, 0.0, 0.0, 0.5;
    b << 0.0, 1.0;
    Tensor3 at(2, 2, 2), bt(2, 1, 2);
    at.set_slice(0, a);
    bt.set_slice(0, b);
    const ExperimentData d = generate_experiment(at, bt, 6, 1, 5);
    REQUIRE(check_sysid(d).verdict);
    const InformativityReport rep = check_tqr(d, Tensor3::identity(2, 2), Tensor3::identity(1, 2));
    CHECK_FALSE(rep.verdict);
    CHECK_THROWS_AS(synth_tqr_gain(d, Tensor3::identity(2, 2), Tensor3::identity(1, 2)), NotInformativeError);
}

TEST_CASE("the second TQR condition accepts zero-input dead-beat data", "[informativity]") {
    tpds::Rng rng(52);
    const Tensor3 y = oracle::random_tensor(rng, 2, 3, 2);
    const ExperimentData d(Tensor3(1, 3, 2), y, Tensor3(2, 3, 2));
    const InformativityReport rep = check_tqr(d, Tensor3::identity(2, 2), Tensor3::identity(1, 2));
    REQUIRE(rep.verdict);
    for (const auto& b : rep.blocks) CHECK(b.condition == "ii");
    const UnfoldedTqr dense = unfolded_check_tqr(unfold_data(d), RealMatrix::Identity(4, 4), RealMatrix::Identity(2, 2));
    CHECK(dense.verdict);
    CHECK_FALSE(dense.condition_i);
}

TEST_CASE("TQR weights are validated", "[informativity]") {
    tpds::Rng rng(53);
    const oracle::System sys = oracle::random_system(rng, 2, 1, 2);
    const ExperimentData d = generate_experiment(sys.a, sys.b, 4, 1, 1);
    CHECK_THROWS_AS(check_tqr(d, Tensor3::identity(3, 2), Tensor3::identity(1, 2)), DimensionError);
    CHECK_THROWS_AS(check_tqr(d, Tensor3::identity(2, 2), Tensor3(1, 1, 2)), PreconditionError);
    CHECK_THROWS_AS(check_tqr(d, -1.0 * Tensor3::identity(2, 2), Tensor3::identity(1, 2)), PreconditionError);
}

TEST_CASE("TQR verdicts match the unfolded test", "[informativity][property]") {
    tpds::Rng rng(54);
    int positive = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 1), m = 1, r = 1 + rng.integer(0, 2);
        const oracle::System sys = oracle::random_system(rng, n, m, r, 0.5 + rng.uniform());
        ExperimentData d = generate_experiment(sys.a, sys.b, n + m + rng.integer(0, 1), 1, 300 + trial);
        if (trial % 3 == 1) d = ExperimentData(Tensor3(m, d.samples(), r), d.y, tprod(sys.a, d.y));
        const Tensor3 q = trial % 2 ? Tensor3::identity(n, r) : oracle::random_tpd(rng, n, r, 0.1);
        const Tensor3 rr = Tensor3::identity(m, r);
        const bool verdict = check_tqr(d, q, rr).verdict;
        CHECK(verdict == unfolded_check_tqr(unfold_data(d), bcirc(q), bcirc(rr)).verdict);
        positive += verdict;
    }
    CHECK(positive > 3);
    CHECK(positive < 27);
}

TEST_CASE("data-driven TQR gain equals the model-based gain", "[informativity]") {
    tpds::Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + rng.integer(0, 2), m = 1 + rng.integer(0, 1), r = 1 + rng.integer(0, 3);
        const oracle::System sys = oracle::random_system(rng, n, m, r, 1.2);
        if (!is_stabilizable(sys.a, sys.b)) continue;
        const ExperimentData d = generate_experiment(sys.a, sys.b, n + m + 2, 1, 400 + trial);
        const Tensor3 q = Tensor3::identity(n, r), rr = oracle::random_tpd(rng, m, r, 0.5);
        double residue = 1.0;
        const Tensor3 k = synth_tqr_gain(d, q, rr, &residue);
        CHECK(residue <= 1e-9);
        const TqrSolution model = solve_tqr(sys.a, sys.b, q, rr);
        CHECK(max_abs_diff(k, model.k) <= 1e-4);
        CHECK(is_stable(sys.a - tprod(sys.b, k)));
    }
}

TEST_CASE("scalar data-driven gain equals the scalar Riccati gain", "[informativity]") {
    const double a = 1.3, b = 0.8, q = 1.0, r = 0.5;
    const Tensor3 at(1, 1, 1, {a}), bt(1, 1, 1, {b});
    const ExperimentData d = generate_experiment(at, bt, 3, 1, 21);
    const Tensor3 k = synth_tqr_gain(d, Tensor3(1, 1, 1, {q}), Tensor3(1, 1, 1, {r}));
    const double p = oracle::scalar_dare(a, b, q, r);
    const double k_ref = a * b * p / (r + b * b * p);
    CHECK(std::abs(k(0, 0, 0) - k_ref) <= 1e-6 * (1.0 + std::abs(k_ref)));
}

TEST_CASE("dead-beat identified dynamics give the zero TQR gain", "[informativity]") {
    tpds::Rng rng(56);
    const ExperimentData d = generate_experiment(Tensor3(2, 2, 3), oracle::random_tensor(rng, 2, 1, 3), 4, 1, 3);
    const Tensor3 k = synth_tqr_gain(d, Tensor3::identity(2, 3), Tensor3::identity(1, 3));
    CHECK(k.max_abs() < 1e-6);
}

TEST_CASE("roundoff-only Fourier blocks are rank deficient", "[informativity]") {
    // Constant tubes put all the energy in the zero frequency; the other
    // blocks hold only transform roundoff.
    tpds::Rng rng(61);
    const RealMatrix y0 = RealMatrix::Random(2, 5), v0 = RealMatrix::Random(1, 5);
    const ExperimentData d(Tensor3::from_slices({v0, v0, v0, v0}), Tensor3::from_slices({y0, y0, y0, y0}),
                           oracle::random_tensor(rng, 2, 5, 4));
    const InformativityReport rep = check_sysid(d);
    CHECK_FALSE(rep.verdict);
    CHECK(rep.blocks[0].success);
    CHECK(rep.blocks[1].rank == 0);
    CHECK(rep.verdict == dense_sysid(d));
}

TEST_CASE("an identified zero input matrix does not stabilize an unstable scalar", "[informativity]") {
    // B = 0 is identified only up to roundoff; the unstable block must still
    // fail the stabilizability part of the first TQR condition.
    Tensor3 a(1, 1, 4);
    a(0, 0, 0) = 0.9;
    a(0, 0, 1) = 0.6;
    const ExperimentData d = generate_experiment(a, Tensor3(1, 2, 4), 6, 1, 11);
    REQUIRE(check_sysid(d).verdict);
    REQUIRE(max_eigentuple_modulus(a) > 1.0);
    const Tensor3 q = Tensor3::identity(1, 4), rr = Tensor3::identity(2, 4);
    const InformativityReport rep = check_tqr(d, q, rr);
    CHECK_FALSE(rep.verdict);
    CHECK(rep.verdict == unfolded_check_tqr(unfold_data(d), bcirc(q), bcirc(rr)).verdict);
    CHECK_THROWS_AS(synth_tqr_gain(d, q, rr), NotInformativeError);
}

TEST_CASE("zero-input data from an unstable scalar are not stabilization informative", "[informativity]") {
    tpds::Rng rng(62);
    const Tensor3 y = oracle::random_tensor(rng, 1, 2, 2);
    Tensor3 a(1, 1, 2);
    a(0, 0, 0) = 1.7;
    a(0, 0, 1) = 0.7;
    const ExperimentData d(Tensor3(1, 2, 2), y, tprod(a, y));
    const InformativityReport rep = check_stabilization(d);
    CHECK_FALSE(rep.verdict);
    CHECK_FALSE(unfolded_check_stabilization(unfold_data(d)).verdict);
}
