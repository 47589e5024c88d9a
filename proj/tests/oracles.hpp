#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "scarsim/basis.hpp"

// Reference implementations written directly from the bit rules, independent of the library internals.
namespace oracle {

inline bool adjacent_pair(std::uint32_t s, int n, bool periodic) {
    for (int j = 0; j + 1 < n; ++j)
        if ((s >> j & 1u) && (s >> (j + 1) & 1u)) return true;
    if (periodic && n >= 2 && (s & 1u) && (s >> (n - 1) & 1u)) return true;
    // A single site under PBC is its own neighbour.
    if (periodic && n == 1 && (s & 1u)) return true;
    return false;
}

inline std::vector<std::uint32_t> brute_basis(int n, bool periodic) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < (1u << n); ++s)
        if (!adjacent_pair(s, n, periodic)) out.push_back(s);
    return out;
}

// Dense H = sum_j P X_j P + mu sum_j n_j on the brute-force basis.
inline Eigen::MatrixXd brute_hamiltonian(int n, bool periodic, double mu) {
    const auto states = brute_basis(n, periodic);
    const auto dim = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        const std::uint32_t s = states[static_cast<std::size_t>(a)];
        H(a, a) = mu * __builtin_popcount(s);
        for (int j = 0; j < n; ++j) {
            const int l = j - 1, r = j + 1;
            auto bit = [&](int site) -> unsigned {
                if (site < 0 || site >= n) {
                    if (!periodic) return 0;
                    site = (site + n) % n;
                }
                return s >> site & 1u;
            };
            if (n > 1 && (bit(l) || bit(r))) continue;
            if (n == 1 && periodic) continue;
            const std::uint32_t t = s ^ (1u << j);
            const auto it = std::lower_bound(states.begin(), states.end(), t);
            H(it - states.begin(), a) += 1.0;
        }
    }
    return H;
}

inline Eigen::VectorXcd random_state(Eigen::Index dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = {g(rng), g(rng)};
    return v.normalized();
}

inline std::vector<double> sorted(const Eigen::VectorXd& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
