// Serial reference vs OpenMP comparison for the data-parallel kernels:
// multi-start Newton, great-circle sweeps and isosurface grid extraction.

#include <benchmark/benchmark.h>

#include "milnor/fibre.hpp"
#include "milnor/mesh_oracle.hpp"
#include "milnor/sphere_critical.hpp"

using namespace milnor;

namespace {

const std::vector<std::string> XYZ = {"x", "y", "z"};

Polynomial cone() { return parse_polynomial("x^2 + y^2 - z^2 - 1/10*x - 1/100*z", XYZ); }

void BM_critical_points(benchmark::State& state, ExecMode mode) {
    Polynomial f = cone();
    SolverConfig cfg;
    cfg.exec = mode;
    for (auto _ : state) {
        auto pts = find_critical_points(f, 1.0, cfg);
        benchmark::DoNotOptimize(pts);
    }
}

void BM_great_circle(benchmark::State& state, ExecMode mode) {
    Polynomial f = cone();
    GreatCircleConfig cfg;
    cfg.exec = mode;
    for (auto _ : state) {
        auto verdict = great_circle_check(f, 1.0, 0.01, cfg);
        benchmark::DoNotOptimize(verdict);
    }
}

void BM_mesh_extract(benchmark::State& state, ExecMode mode) {
    Polynomial f = cone();
    MeshConfig cfg;
    cfg.exec = mode;
    for (auto _ : state) {
        MeshComplex m = extract_fibre(f, 0.1, 1.0, cfg);
        benchmark::DoNotOptimize(m);
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_critical_points, serial, ExecMode::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_critical_points, openmp, ExecMode::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_great_circle, serial, ExecMode::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_great_circle, openmp, ExecMode::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_mesh_extract, serial, ExecMode::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_mesh_extract, openmp, ExecMode::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
