#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace elastoblow {

/// Worker count requested through ELASTOBLOW_THREADS; 0 means "runtime default".
inline auto requested_threads() -> int {
    const char* env = std::getenv("ELASTOBLOW_THREADS");
    if (env == nullptr) {
        return 0;
    }
    try {
        const int n = std::stoi(env);
        return n > 0 ? n : 0;
    } catch (...) {
        return 0;
    }
}

inline void configure_threads() {
#ifdef _OPENMP
    if (const int n = requested_threads(); n > 0) {
        omp_set_num_threads(n);
    }
#endif
}

/// Runs body(k) for k in [begin, end), split across workers on the outermost axis.
template <typename Body>
inline void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = begin; k < end; ++k) {
        body(k);
    }
#else
    for (std::ptrdiff_t k = begin; k < end; ++k) {
        body(k);
    }
#endif
}

} // namespace elastoblow
