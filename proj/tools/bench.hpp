#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tpds/informativity.hpp"

namespace tpds::bench {

enum class Method { Decoupled, Unfolded };

const char* to_string(Method m);
Task parse_task(const std::string& name);

struct Config {
    Task task = Task::Stabilization;
    int p_min = 1;
    int p_max = 6;
    int trials = 5;
    double timeout_secs = 120.0;
    std::size_t memory_limit_mb = 4096;  // address-space cap per trial, 0 = none
    std::uint64_t seed = 1;
    std::size_t n = 2;
    std::size_t m = 2;
    std::size_t l = 4;
    std::size_t h = 1;
};

struct Record {
    Method method = Method::Decoupled;
    Task task = Task::Stabilization;
    int p = 0;
    std::size_t n = 0, m = 0, l = 0, h = 0;
    int trials = 0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
    bool ok = false;
    std::string note;  // reason for a failure, not part of the CSV
};

/// Data for one (p, trial): a random system of depth 2^p and one experiment.
ExperimentData make_data(const Config& config, int p, int trial);

/// 64-bit FNV-1a over the shapes and entries of v, y and z.
std::uint64_t fingerprint(const ExperimentData& d);

/// Runs the algorithmic kernel once in the calling process and returns the
/// wall-clock seconds spent in it.
double run_kernel(Method method, Task task, const ExperimentData& d);

/// Runs every (p, method, trial) in a child process under the timeout and
/// memory cap. A method that fails at some p is recorded as failed for every
/// larger p without running it.
std::vector<Record> run(const Config& config, std::ostream* log = nullptr);

void write_csv(std::ostream& out, const std::vector<Record>& records);

}  // namespace tpds::bench
