// Compares the serial replicate loop against the threaded one on the same
// scenario and verifies that the summaries agree bit for bit.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "hest/report.hpp"
#include "hest/scenario.hpp"
#include "hest/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    hest::ScenarioParams params;
    params.name = "bench";
    params.n = 500;
    params.n_reps = argc > 1 ? std::atoi(argv[1]) : 2000;
    params.seed = 20260825;

    hest::StudyOptions serial_options;
    serial_options.force_serial = true;

    hest::StudyOptions parallel_options;
    parallel_options.workers = 0;  // everything the machine offers

    auto t0 = std::chrono::steady_clock::now();
    const hest::SimulationSummary serial = hest::run_study(params, serial_options);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const hest::SimulationSummary parallel = hest::run_study(params, parallel_options);
    const double parallel_s = seconds_since(t0);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("replicates: %d, records each: %d\n", params.n_reps, params.n);
    std::printf("serial:   %.3f s\n", serial_s);
    std::printf("threaded: %.3f s (%d threads), speedup %.2fx\n", parallel_s, threads,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);

    bool identical = serial.rows.size() == parallel.rows.size();
    for (std::size_t i = 0; identical && i < serial.rows.size(); ++i) {
        identical = std::memcmp(&serial.rows[i].mean_delta, &parallel.rows[i].mean_delta,
                                sizeof(double)) == 0 &&
                    std::memcmp(&serial.rows[i].empirical_se, &parallel.rows[i].empirical_se,
                                sizeof(double)) == 0 &&
                    serial.rows[i].n_failures == parallel.rows[i].n_failures;
    }
    std::printf("summaries bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
