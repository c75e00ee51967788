#ifndef MILNOR_PARALLEL_HPP
#define MILNOR_PARALLEL_HPP

#include <cstddef>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace milnor {

// Every data-parallel kernel takes an ExecMode. The serial path is the
// reference the OpenMP path is tested against; kernels write results into
// slots indexed by item so both modes produce identical output.
enum class ExecMode { serial, parallel };

// Worker cap: min(OpenMP default, MILNOR_THREADS env var when set).
inline int max_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("MILNOR_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

template <typename Body>
void parallel_for(std::size_t count, ExecMode mode, Body&& body) {
#ifdef _OPENMP
    if (mode == ExecMode::parallel && count > 1) {
        const int threads = max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace milnor

#endif
