#pragma once

// Index-parallel loop over independent tasks (grid points, replications).
//
// `jobs <= 1` takes the serial reference path, which is what the tests compare
// the OpenMP path against. Results must be written to per-index slots; the
// first exception in index order is rethrown after the loop finishes.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bagus {

/// Number of worker threads OpenMP would use, or 1 without OpenMP.
inline int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class Body>
void parallel_for(std::ptrdiff_t count, int jobs, Body&& body) {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count > 0 ? count : 0));
    if (jobs <= 1 || count <= 1) {
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
#endif
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace bagus
