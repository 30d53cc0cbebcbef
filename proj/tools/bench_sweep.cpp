// Benchmark: serial reference sweep vs the OpenMP sweep on one scenario,
// with a bit-equality cross-check between the two.

#include "dagbft/sweep/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace dagbft;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP sweep benchmark"};
    std::string scenario_path;
    uint64_t seeds = 64;
    int jobs = 0;
    app.add_option("scenario", scenario_path, "scenario config file")->required();
    app.add_option("--seeds", seeds, "number of seeds (1..N)");
    app.add_option("--jobs", jobs, "threads for the parallel pass (0 = all)");
    CLI11_PARSE(app, argc, argv);

    sim::Scenario sc;
    try {
        sc = sim::load_scenario_file(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    sc.seeds.clear();
    for (uint64_t s = 1; s <= seeds; ++s) sc.seeds.push_back(s);

#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
    const int threads = 1;
    std::cout << "(built without OpenMP: parallel pass runs serially)\n";
#endif

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = sweep::run_many_serial(sc);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = sweep::run_many_parallel(sc, jobs);
    const double t_parallel = seconds_since(t0);

    bool identical = serial.size() == parallel.size();
    for (size_t i = 0; identical && i < serial.size(); ++i)
        identical = serial[i].trace_hash == parallel[i].trace_hash &&
                    serial[i].all_pass == parallel[i].all_pass;

    std::cout << "scenario " << sc.name << ", " << seeds << " seeds\n"
              << "  serial   : " << t_serial << " s  (" << seeds / t_serial << " runs/s)\n"
              << "  parallel : " << t_parallel << " s  (" << seeds / t_parallel << " runs/s, "
              << threads << " threads)\n"
              << "  speedup  : " << t_serial / t_parallel << "x\n"
              << "  outcomes : " << (identical ? "bit-identical" : "MISMATCH") << "\n";
    return identical ? 0 : 1;
}
