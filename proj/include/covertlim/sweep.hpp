#pragma once

#include <cstdint>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

// Grid sweeps parallelize across parameter points: each point writes only
// its own output slot, so results are identical for any thread count. The
// serial variant is the reference implementation used by the tests and the
// benchmark.

namespace covertlim {

inline void serial_for_index(std::int64_t count,
                             const std::function<void(std::int64_t)>& fn) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
}

/// threads == 0 picks the runtime default; threads == 1 is exactly the
/// serial loop.
inline void parallel_for_index(std::int64_t count,
                               const std::function<void(std::int64_t)>& fn,
                               int threads = 0) {
#ifdef _OPENMP
    if (threads == 1) {
        serial_for_index(count, fn);
        return;
    }
    if (threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::int64_t i = 0; i < count; ++i) fn(i);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < count; ++i) fn(i);
    }
#else
    serial_for_index(count, fn);
#endif
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace covertlim
