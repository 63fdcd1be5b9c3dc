#include "bench.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "tpds/errors.hpp"
#include "tpds/sim.hpp"
#include "tpds/unfolded.hpp"

namespace tpds::bench {

namespace {

struct TrialMessage {
    double seconds;
    std::uint64_t fingerprint;
    int ok;
    char note[200];
};

bool read_all(int fd, void* buf, std::size_t size, double timeout_secs) {
    auto* out = static_cast<char*>(buf);
    std::size_t got = 0;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_secs);
    while (got < size) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return false;
        pollfd pfd{fd, POLLIN, 0};
        const int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000000)));
        if (rc < 0 && errno == EINTR) continue;
        if (rc <= 0) continue;
        const ssize_t n = read(fd, out + got, size - got);
        if (n <= 0) return false;
        got += static_cast<std::size_t>(n);
    }
    return true;
}

// Fork, run the kernel in the child, collect timing or a failure note.
TrialMessage run_isolated(Method method, Task task, const ExperimentData& d, const Config& config) {
    TrialMessage msg{};
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("bench: pipe failed");
    std::fflush(nullptr);
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("bench: fork failed");
    if (pid == 0) {
        close(fds[0]);
        if (config.memory_limit_mb > 0) {
            const rlim_t bytes = static_cast<rlim_t>(config.memory_limit_mb) * 1024 * 1024;
            rlimit lim{bytes, bytes};
            setrlimit(RLIMIT_AS, &lim);
        }
        TrialMessage out{};
        out.fingerprint = fingerprint(d);
        try {
            out.seconds = run_kernel(method, task, d);
            out.ok = 1;
        } catch (const std::exception& e) {
            out.ok = 0;
            std::snprintf(out.note, sizeof(out.note), "%s", e.what());
        }
        const ssize_t written = write(fds[1], &out, sizeof(out));
        _exit(written == static_cast<ssize_t>(sizeof(out)) ? 0 : 1);
    }
    close(fds[1]);
    const bool finished = read_all(fds[0], &msg, sizeof(msg), config.timeout_secs);
    close(fds[0]);
    if (!finished) {
        kill(pid, SIGKILL);
        msg.ok = 0;
        msg.fingerprint = 0;
        int status = 0;
        waitpid(pid, &status, 0);
        if (WIFSIGNALED(status) && WTERMSIG(status) != SIGKILL)
            std::snprintf(msg.note, sizeof(msg.note), "terminated by signal %d", WTERMSIG(status));
        else
            std::snprintf(msg.note, sizeof(msg.note), "timeout after %.0f s", config.timeout_secs);
        return msg;
    }
    waitpid(pid, nullptr, 0);
    return msg;
}

Tensor3 random_tensor(Rng& rng, std::size_t rows, std::size_t cols, std::size_t depth, double scale) {
    Tensor3 t = rng.tensor(rows, cols, depth, InputLaw::Uniform);
    t *= scale;
    return t;
}

}  // namespace

const char* to_string(Method m) { return m == Method::Decoupled ? "decoupled" : "unfolded"; }

Task parse_task(const std::string& name) {
    if (name == "sysid") return Task::SystemIdentification;
    if (name == "stabilization") return Task::Stabilization;
    if (name == "tqr") return Task::Tqr;
    throw PreconditionError("unknown task '" + name + "' (expected sysid, stabilization or tqr)");
}

ExperimentData make_data(const Config& config, int p, int trial) {
    const std::size_t r = std::size_t{1} << p;
    const std::uint64_t seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(p) * 1009ULL +
                               static_cast<std::uint64_t>(trial);
    Rng rng(seed);
    // Entries scaled so that the slices sum to a matrix of moderate size.
    const double scale = 1.0 / std::sqrt(static_cast<double>(r * config.n));
    const Tensor3 a = random_tensor(rng, config.n, config.n, r, scale);
    const Tensor3 b = random_tensor(rng, config.n, config.m, r, scale);
    return generate_experiment(a, b, config.l, config.h, seed ^ 0x9e3779b97f4a7c15ULL);
}

std::uint64_t fingerprint(const ExperimentData& d) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    for (const Tensor3* t : {&d.v, &d.y, &d.z}) {
        const std::size_t dims[3] = {t->rows(), t->cols(), t->depth()};
        mix(dims, sizeof(dims));
        mix(t->data().data(), t->data().size_bytes());
    }
    return h;
}

double run_kernel(Method method, Task task, const ExperimentData& d) {
    const auto start = std::chrono::steady_clock::now();
    if (method == Method::Decoupled) {
        switch (task) {
            case Task::SystemIdentification:
                check_sysid(d);
                break;
            case Task::Stabilization: {
                const InformativityReport rep = check_stabilization(d);
                if (rep.verdict) synth_stabilizing_gain(d, rep);
                break;
            }
            case Task::Tqr: {
                const Tensor3 q = Tensor3::identity(d.n(), d.r());
                const Tensor3 rr = Tensor3::identity(d.m(), d.r());
                if (check_tqr(d, q, rr).verdict) synth_tqr_gain(d, q, rr);
                break;
            }
        }
    } else {
        const UnfoldedData u = unfold_data(d);
        switch (task) {
            case Task::SystemIdentification:
                unfolded_check_sysid(u);
                break;
            case Task::Stabilization: {
                const UnfoldedStabilization st = unfolded_check_stabilization(u);
                if (st.verdict) unfolded_stabilizing_gain(u, st.s);
                break;
            }
            case Task::Tqr: {
                const RealMatrix q = RealMatrix::Identity(u.y.rows(), u.y.rows());
                const RealMatrix rr = RealMatrix::Identity(u.v.rows(), u.v.rows());
                if (unfolded_check_tqr(u, q, rr).verdict) unfolded_tqr_gain(u, q, rr);
                break;
            }
        }
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Record> run(const Config& config, std::ostream* log) {
    if (config.p_min < 0 || config.p_max < config.p_min) throw PreconditionError("bench: empty p range");
    if (config.trials < 1) throw PreconditionError("bench: trials must be at least 1");
    if (config.l * config.h < config.n + config.m) throw PreconditionError("bench: need l*h >= n+m");

    std::vector<Record> records;
    bool failed[2] = {false, false};
    for (int p = config.p_min; p <= config.p_max; ++p) {
        for (Method method : {Method::Decoupled, Method::Unfolded}) {
            Record rec;
            rec.method = method;
            rec.task = config.task;
            rec.p = p;
            rec.n = config.n;
            rec.m = config.m;
            rec.l = config.l;
            rec.h = config.h;
            rec.trials = config.trials;
            bool& dead = failed[method == Method::Unfolded];
            if (dead) {
                rec.note = "skipped after failure at smaller p";
                records.push_back(rec);
                continue;
            }
            std::vector<double> times;
            for (int trial = 0; trial < config.trials; ++trial) {
                const ExperimentData d = make_data(config, p, trial);
                const std::uint64_t expected = fingerprint(d);
                const TrialMessage msg = run_isolated(method, config.task, d, config);
                if (!msg.ok) {
                    rec.note = msg.note;
                    dead = true;
                    break;
                }
                if (msg.fingerprint != expected) throw std::logic_error("bench: methods saw different data");
                times.push_back(msg.seconds);
            }
            if (!dead) {
                double mean = 0.0;
                for (double t : times) mean += t;
                mean /= static_cast<double>(times.size());
                double var = 0.0;
                for (double t : times) var += (t - mean) * (t - mean);
                rec.mean_seconds = mean;
                rec.std_seconds = times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
                rec.ok = true;
            }
            if (log) {
                *log << to_string(method) << ' ' << tpds::to_string(config.task) << " p=" << p << ": "
                     << (rec.ok ? "ok" : "failed");
                if (rec.ok) *log << " mean " << rec.mean_seconds << " s";
                if (!rec.note.empty()) *log << " (" << rec.note << ")";
                *log << '\n';
            }
            records.push_back(rec);
        }
    }
    return records;
}

void write_csv(std::ostream& out, const std::vector<Record>& records) {
    out << "method,task,p,n,m,l,h,trials,mean_seconds,std_seconds,status\n";
    char buf[64];
    for (const Record& r : records) {
        out << to_string(r.method) << ',' << tpds::to_string(r.task) << ',' << r.p << ',' << r.n << ',' << r.m << ','
            << r.l << ',' << r.h << ',' << r.trials << ',';
        if (r.ok) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f", r.mean_seconds, r.std_seconds);
            out << buf;
        } else {
            out << ',';
        }
        out << ',' << (r.ok ? "ok" : "failed") << '\n';
    }
}

}  // namespace tpds::bench
