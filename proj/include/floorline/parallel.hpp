#ifndef FLOORLINE_PARALLEL_HPP
#define FLOORLINE_PARALLEL_HPP

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace floorline {

// Worker count for all parallel regions. FLOORLINE_THREADS overrides the
// OpenMP default; anything < 1 falls back to 1.
inline int worker_count() {
    if (const char* env = std::getenv("FLOORLINE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace floorline

#endif
