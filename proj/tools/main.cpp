// tpds: command-line front end for the T-product data-driven control library.
//
// Exit codes: 0 verdict true / success, 1 verdict false, 2 input or solver error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bench.hpp"
#include "tpds/errors.hpp"
#include "tpds/informativity.hpp"
#include "tpds/json_io.hpp"
#include "tpds/sim.hpp"
#include "tpds/spectral.hpp"
#include "tpds/tqr.hpp"

namespace {

using namespace tpds;
using io::json;

constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kError = 2;

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

struct Weights {
    std::string q_file;
    std::string r_file;
};

// Defaults to identity weights when no files are given.
std::pair<Tensor3, Tensor3> load_weights(const Weights& w, const ExperimentData& d) {
    Tensor3 q = w.q_file.empty() ? Tensor3::identity(d.n(), d.r()) : io::read_tensor_file(w.q_file);
    Tensor3 r = w.r_file.empty() ? Tensor3::identity(d.m(), d.r()) : io::read_tensor_file(w.r_file);
    return {std::move(q), std::move(r)};
}

ExperimentData load_data(const std::string& path) { return io::data_from_json(io::read_json_file(path)); }

Task task_of(const std::string& name) { return bench::parse_task(name); }

int cmd_check(const std::string& task, const std::string& data_file, const Weights& w) {
    const ExperimentData d = load_data(data_file);
    InformativityReport rep;
    switch (task_of(task)) {
        case Task::SystemIdentification: rep = check_sysid(d); break;
        case Task::Stabilization: rep = check_stabilization(d); break;
        case Task::Tqr: {
            const auto [q, r] = load_weights(w, d);
            rep = check_tqr(d, q, r);
            break;
        }
    }
    print(io::report_to_json(rep));
    return rep.verdict ? kTrue : kFalse;
}

int cmd_synth(const std::string& task, const std::string& data_file, const Weights& w, const std::string& out) {
    const ExperimentData d = load_data(data_file);
    Tensor3 k;
    InformativityReport rep;
    double residue = 0.0;
    switch (task_of(task)) {
        case Task::SystemIdentification:
            throw PreconditionError("synth supports stabilization and tqr");
        case Task::Stabilization:
            rep = check_stabilization(d);
            if (!rep.verdict) {
                print(io::report_to_json(rep));
                return kFalse;
            }
            k = synth_stabilizing_gain(d, rep, &residue);
            break;
        case Task::Tqr: {
            const auto [q, r] = load_weights(w, d);
            rep = check_tqr(d, q, r);
            if (!rep.verdict) {
                print(io::report_to_json(rep));
                return kFalse;
            }
            k = synth_tqr_gain(d, q, r, &residue);
            break;
        }
    }
    const IdentifiedSystem sys = identify_least_squares(d);
    const double modulus = max_eigentuple_modulus(sys.a - tprod(sys.b, k));
    json summary = {{"task", task},
                    {"verdict", true},
                    {"gain", io::tensor_to_json(k)},
                    {"gain_imag_residue", residue},
                    {"fit_residual", sys.residual},
                    {"closed_loop_max_modulus", modulus}};
    if (!out.empty()) io::write_json_file(out, io::tensor_to_json(k));
    print(summary);
    return kTrue;
}

int cmd_verify(const std::string& data_file, const std::string& a_file, const std::string& b_file,
               const std::string& gain_file, const std::string& law) {
    Tensor3 a, b;
    if (!data_file.empty()) {
        const IdentifiedSystem sys = identify_least_squares(load_data(data_file));
        a = sys.a;
        b = sys.b;
    } else {
        if (a_file.empty() || b_file.empty()) throw PreconditionError("verify needs --data or both --a and --b");
        a = io::read_tensor_file(a_file);
        b = io::read_tensor_file(b_file);
    }
    const Tensor3 k = io::read_tensor_file(gain_file);
    if (k.rows() != b.cols() || k.cols() != a.rows() || k.depth() != a.depth())
        throw DimensionError("gain shape does not match the system");
    const Tensor3 bk = tprod(b, k);
    const Tensor3 closed = law == "plus" ? a + bk : a - bk;
    const double modulus = max_eigentuple_modulus(closed);
    const bool stable = modulus < 1.0 - 1e-9;
    print({{"law", law == "plus" ? "u = +K*x" : "u = -K*x"}, {"stable", stable}, {"max_modulus", modulus}});
    return stable ? kTrue : kFalse;
}

int cmd_identify(const std::string& data_file, bool least_squares, const std::string& out) {
    const ExperimentData d = load_data(data_file);
    IdentifiedSystem sys;
    if (least_squares) {
        sys = identify_least_squares(d);
    } else {
        try {
            sys = identify(d);
        } catch (const NotInformativeError& e) {
            std::cerr << "tpds: " << e.what() << '\n';
            print(io::report_to_json(check_sysid(d)));
            return kFalse;
        }
    }
    const json j = {{"a", io::tensor_to_json(sys.a)}, {"b", io::tensor_to_json(sys.b)}, {"residual", sys.residual}};
    if (!out.empty()) io::write_json_file(out, j);
    print(j);
    return kTrue;
}

int cmd_simulate(const std::string& a_file, const std::string& b_file, const std::string& x0_file,
                 const std::string& gain_file, const std::string& inputs_file, std::size_t steps, std::size_t h,
                 std::uint64_t seed, const std::string& out) {
    const Tensor3 a = io::read_tensor_file(a_file), b = io::read_tensor_file(b_file);
    Tensor3 x0;
    if (!x0_file.empty()) {
        x0 = io::read_tensor_file(x0_file);
    } else {
        Rng rng(seed);
        x0 = rng.tensor(a.rows(), h, a.depth(), InputLaw::Uniform);
    }
    Trajectory traj;
    if (!gain_file.empty()) {
        traj = simulate_closed_loop(a, b, io::read_tensor_file(gain_file), x0, steps);
    } else if (!inputs_file.empty()) {
        const json frames = io::read_json_file(inputs_file);
        if (!frames.is_array()) throw FormatError("inputs file must hold an array of tensors");
        std::vector<Tensor3> inputs;
        for (const auto& f : frames) inputs.push_back(io::tensor_from_json(f));
        traj = simulate(a, b, x0, inputs);
    } else {
        traj = simulate(a, b, x0, std::vector<Tensor3>(steps, Tensor3(b.cols(), x0.cols(), a.depth())));
    }
    json j = io::trajectory_to_json(traj);
    json norms = json::array();
    for (const auto& x : traj.states) norms.push_back(x.frobenius_norm());
    j["state_norms"] = std::move(norms);
    if (!out.empty()) io::write_json_file(out, j);
    print(j);
    return traj.diverged ? kFalse : kTrue;
}

int cmd_generate(const std::string& a_file, const std::string& b_file, std::size_t l, std::size_t h,
                 std::uint64_t seed, const std::string& law, const std::string& out) {
    const ExperimentData d =
        generate_experiment(io::read_tensor_file(a_file), io::read_tensor_file(b_file), l, h, seed, parse_input_law(law));
    const json j = io::data_to_json(d);
    if (!out.empty()) io::write_json_file(out, j);
    print(j);
    return kTrue;
}

int cmd_solve_tqr(const std::string& a_file, const std::string& b_file, const Weights& w, const std::string& out) {
    const Tensor3 a = io::read_tensor_file(a_file), b = io::read_tensor_file(b_file);
    const Tensor3 q = w.q_file.empty() ? Tensor3::identity(a.rows(), a.depth()) : io::read_tensor_file(w.q_file);
    const Tensor3 r = w.r_file.empty() ? Tensor3::identity(b.cols(), a.depth()) : io::read_tensor_file(w.r_file);
    const TqrSolution sol = solve_tqr(a, b, q, r);
    const json j = {{"p", io::tensor_to_json(sol.p)},
                    {"k", io::tensor_to_json(sol.k)},
                    {"block_residuals", sol.residuals},
                    {"closed_loop_radii", sol.closed_loop_radii},
                    {"riccati_residual", is_riccati_solution(sol.p, a, b, q, r)}};
    if (!out.empty()) io::write_json_file(out, j);
    print(j);
    return kTrue;
}

int cmd_spectrum(const std::string& tensor_file, const std::string& kind) {
    const Tensor3 t = io::read_tensor_file(tensor_file);
    if (kind == "svd") {
        print({{"singular_tuples", io::spectrum_to_json(tsvd(t).singular_tuples)}});
    } else if (kind == "eig") {
        print({{"eigentuples", io::spectrum_to_json(teig(t).eigentuples)}, {"max_modulus", max_eigentuple_modulus(t)},
               {"stable", is_stable(t)}});
    } else {
        throw PreconditionError("--kind must be eig or svd");
    }
    return kTrue;
}

int cmd_bench(const bench::Config& config, const std::string& out) {
    const std::vector<bench::Record> records = bench::run(config, &std::cerr);
    if (out.empty()) {
        bench::write_csv(std::cout, records);
    } else {
        std::ofstream f(out);
        if (!f) throw FormatError("cannot write " + out);
        bench::write_csv(f, records);
    }
    return kTrue;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"T-product data-driven control: informativity checks, controller synthesis, simulation"};
    app.require_subcommand(1);

    std::string data, out, a_file, b_file, x0_file, gain_file, inputs_file, tensor_file;
    std::string law = "minus", input_law = "uniform", kind = "eig";
    Weights weights;
    bool least_squares = false;
    std::uint64_t seed = 1;
    std::size_t steps = 50, l = 4, h = 1;
    bench::Config bench_config;

    const std::vector<std::string> tasks = {"sysid", "stabilization", "tqr"};

    // check/synth take the task as a nested subcommand: `tpds check stabilization --data f`.
    auto add_tasks = [](CLI::App* parent, const std::vector<std::string>& names) {
        parent->require_subcommand(1);
        for (const auto& name : names) parent->add_subcommand(name)->fallthrough();
    };

    auto* check = app.add_subcommand("check", "Data informativity test; prints a JSON report");
    add_tasks(check, tasks);
    check->add_option("--data", data, "experiment data JSON {v, y, z}")->required();
    check->add_option("--weights-q", weights.q_file, "Q tensor (default identity)");
    check->add_option("--weights-r", weights.r_file, "R tensor (default identity)");

    auto* synth = app.add_subcommand("synth", "Controller synthesis from data");
    add_tasks(synth, {"stabilization", "tqr"});
    synth->add_option("--data", data, "experiment data JSON")->required();
    synth->add_option("--weights-q", weights.q_file, "Q tensor (default identity)");
    synth->add_option("--weights-r", weights.r_file, "R tensor (default identity)");
    synth->add_option("--out", out, "write the gain tensor here");

    auto* verify = app.add_subcommand("verify", "Closed-loop stability of a gain");
    verify->add_option("--data", data, "use the least-squares model of these data");
    verify->add_option("--a", a_file, "A tensor");
    verify->add_option("--b", b_file, "B tensor");
    verify->add_option("--gain", gain_file, "K tensor")->required();
    verify->add_option("--law", law, "minus: A - B*K (u = -K*x), plus: A + B*K")
        ->check(CLI::IsMember({"minus", "plus"}));

    auto* ident = app.add_subcommand("identify", "System identification from data");
    ident->add_option("--data", data, "experiment data JSON")->required();
    ident->add_flag("--least-squares", least_squares, "fit even when the data are not informative");
    ident->add_option("--out", out, "write {a, b} here");

    auto* sim = app.add_subcommand("simulate", "Open- or closed-loop simulation");
    sim->add_option("--a", a_file, "A tensor")->required();
    sim->add_option("--b", b_file, "B tensor")->required();
    sim->add_option("--x0", x0_file, "initial state (default: random with --seed)");
    sim->add_option("--gain", gain_file, "closed loop with u = -K*x");
    sim->add_option("--inputs", inputs_file, "JSON array of input tensors");
    sim->add_option("--steps", steps, "steps without explicit inputs");
    sim->add_option("--columns", h, "columns of the random initial state");
    sim->add_option("--seed", seed, "seed of the random initial state");
    sim->add_option("--out", out, "write the trajectory here");

    auto* gen = app.add_subcommand("generate", "Experiment data from a known system");
    gen->add_option("--a", a_file, "A tensor")->required();
    gen->add_option("--b", b_file, "B tensor")->required();
    gen->add_option("--length", l, "samples per trajectory (l)");
    gen->add_option("--trajectories", h, "trajectories (h)");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--input-law", input_law, "uniform or integer")->check(CLI::IsMember({"uniform", "integer"}));
    gen->add_option("--out", out, "write the data here");

    auto* tqr = app.add_subcommand("solve-tqr", "Model-based TQR");
    tqr->add_option("--a", a_file, "A tensor")->required();
    tqr->add_option("--b", b_file, "B tensor")->required();
    tqr->add_option("--weights-q", weights.q_file, "Q tensor (default identity)");
    tqr->add_option("--weights-r", weights.r_file, "R tensor (default identity)");
    tqr->add_option("--out", out, "write {p, k} here");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigentuples or singular tuples");
    spectrum_cmd->add_option("--tensor", tensor_file, "tensor JSON")->required();
    spectrum_cmd->add_option("--kind", kind, "eig or svd")->check(CLI::IsMember({"eig", "svd"}));

    auto* bench_cmd = app.add_subcommand("bench", "Decoupled vs unfolded timing, CSV output");
    std::string bench_task = "stabilization";
    bench_cmd->add_option("--task", bench_task, "sysid, stabilization or tqr")->check(CLI::IsMember(tasks));
    bench_cmd->add_option("--p-min", bench_config.p_min, "smallest p (r = 2^p)");
    bench_cmd->add_option("--p-max", bench_config.p_max, "largest p");
    bench_cmd->add_option("--trials", bench_config.trials, "trials per p");
    bench_cmd->add_option("--timeout-secs", bench_config.timeout_secs, "per-trial timeout");
    bench_cmd->add_option("--memory-limit-mb", bench_config.memory_limit_mb, "per-trial memory cap, 0 = none");
    bench_cmd->add_option("--seed", bench_config.seed, "base seed");
    bench_cmd->add_option("--out", out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*check) return cmd_check(check->get_subcommands().front()->get_name(), data, weights);
        if (*synth) return cmd_synth(synth->get_subcommands().front()->get_name(), data, weights, out);
        if (*verify) return cmd_verify(data, a_file, b_file, gain_file, law);
        if (*ident) return cmd_identify(data, least_squares, out);
        if (*sim) return cmd_simulate(a_file, b_file, x0_file, gain_file, inputs_file, steps, h, seed, out);
        if (*gen) return cmd_generate(a_file, b_file, l, h, seed, input_law, out);
        if (*tqr) return cmd_solve_tqr(a_file, b_file, weights, out);
        if (*spectrum_cmd) return cmd_spectrum(tensor_file, kind);
        if (*bench_cmd) {
            bench_config.task = bench::parse_task(bench_task);
            return cmd_bench(bench_config, out);
        }
    } catch (const NotInformativeError& e) {
        std::cerr << "tpds: " << e.what() << '\n';
        return kFalse;
    } catch (const std::exception& e) {
        std::cerr << "tpds: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
