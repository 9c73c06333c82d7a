#pragma once

#include <bagus/matrix.hpp>

#include <random>

namespace bagus::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = z(rng);
        }
    }
    return m;
}

inline SymMatrix random_symmetric(std::mt19937_64& rng, Index p) {
    const Matrix a = random_matrix(rng, p, p);
    return SymMatrix::from_upper(a + a.transpose());
}

/// AᵀA/p + ridge·I.
inline SymMatrix random_spd(std::mt19937_64& rng, Index p, double ridge = 1.0) {
    const Matrix a = random_matrix(rng, p, p);
    Matrix m = a.transpose() * a / static_cast<double>(p);
    m.diagonal().array() += ridge;
    return SymMatrix::from_upper(m);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace bagus::testing
