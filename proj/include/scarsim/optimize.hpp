#pragma once

#include <functional>
#include <vector>

namespace scarsim {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free minimization (Nelder-Mead simplex from GSL).
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const std::vector<double>& step, double size_tol = 1e-8, int max_iter = 2000);

}  // namespace scarsim
