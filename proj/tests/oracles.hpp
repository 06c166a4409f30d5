#pragma once

// Test-only reference computations. These follow the written laws directly on
// plain nested vectors and share no code with the engines they check.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Triangle inequality on d = 1 - rho, scanned over every triple.
inline bool metric_form_holds(const Matrix& rho, double tol) {
    const std::size_t n = rho.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z) {
                const double dxy = 1.0 - rho[x][y];
                const double dxz = 1.0 - rho[x][z];
                const double dzy = 1.0 - rho[z][y];
                if (dxy > dxz + dzy + tol) return false;
            }
    return true;
}

struct PrimitiveInstance {
    Matrix rho;                 ///< persons x persons
    std::vector<std::size_t> owner;  ///< per good
    std::vector<double> power;  ///< per person
    Matrix force;               ///< persons x goods
};

inline double psi(const PrimitiveInstance& s, std::size_t x, std::size_t a) {
    return s.force[x][a] * s.rho[x][s.owner[a]];
}

/// Win probabilities for good a; incumbent keeps the good if nobody pushes.
inline std::vector<double> win_probabilities(const PrimitiveInstance& s, std::size_t a) {
    const std::size_t n = s.power.size();
    double total = 0.0;
    for (std::size_t y = 0; y < n; ++y) total += psi(s, y, a);
    std::vector<double> p(n, 0.0);
    if (total == 0.0) {
        p[s.owner[a]] = 1.0;
        return p;
    }
    for (std::size_t y = 0; y < n; ++y) p[y] = psi(s, y, a) / total;
    return p;
}

/// pi'(x) = pi(x) - sum_{gains(x)} phi(x,a)
///        + sum_{losses(x)} phi(alpha'(a),a) * psi(x,a) / sum_{y != alpha'(a)} psi(y,a),
/// with an even split when that denominator vanishes and no payment for |P| = 1.
inline std::vector<double> successor_power(const PrimitiveInstance& s, const std::vector<std::size_t>& winners) {
    const std::size_t n = s.power.size();
    const std::size_t m = winners.size();
    std::vector<double> next(n);
    for (std::size_t x = 0; x < n; ++x) {
        double value = s.power[x];
        if (n == 1) {
            next[x] = value;
            continue;
        }
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t w = winners[a];
            if (w == x) {
                value -= s.force[x][a];
                continue;
            }
            double denom = 0.0;
            for (std::size_t y = 0; y < n; ++y)
                if (y != w) denom += psi(s, y, a);
            const double share = denom > 0.0 ? psi(s, x, a) / denom : 1.0 / static_cast<double>(n - 1);
            value += s.force[w][a] * share;
        }
        next[x] = value;
    }
    return next;
}

/// Expected successor power by enumerating every winner combination with its exact probability.
inline std::vector<double> expected_successor_power(const PrimitiveInstance& s) {
    const std::size_t n = s.power.size();
    const std::size_t m = s.owner.size();
    std::vector<std::vector<double>> probs(m);
    for (std::size_t a = 0; a < m; ++a) probs[a] = win_probabilities(s, a);

    std::vector<double> expected(n, 0.0);
    std::vector<std::size_t> winners(m, 0);
    while (true) {
        double p = 1.0;
        for (std::size_t a = 0; a < m; ++a) p *= probs[a][winners[a]];
        if (p > 0.0) {
            const auto next = successor_power(s, winners);
            for (std::size_t x = 0; x < n; ++x) expected[x] += p * next[x];
        }
        std::size_t a = 0;
        while (a < m && ++winners[a] == n) winners[a++] = 0;
        if (a == m) break;
    }
    return expected;
}

/// Good update on a dense [x][a][y] cube: pi - phi + phi transposed.
using Cube = std::vector<std::vector<std::vector<double>>>;

inline Cube good_successor(const Cube& power, const Cube& force) {
    Cube next = power;
    for (std::size_t x = 0; x < power.size(); ++x)
        for (std::size_t a = 0; a < power[x].size(); ++a)
            for (std::size_t y = 0; y < power.size(); ++y)
                next[x][a][y] = power[x][a][y] - force[x][a][y] + force[y][a][x];
    return next;
}

}  // namespace oracle
