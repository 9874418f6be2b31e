#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "modkit/errors.hpp"

namespace modkit {

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    int evaluations = 0;
};

// Plain Nelder-Mead; deterministic, no randomness. The best-so-far value is
// non-increasing across accepted iterations.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, std::vector<double> step,
                                    double tol = 1e-10, int max_iter = 2000) {
    const std::size_t dim = start.size();
    if (dim == 0) throw ParamError("nelder_mead: empty start point");
    if (step.size() != dim) throw ParamError("nelder_mead: step size mismatch");

    NelderMeadResult result;
    std::vector<std::vector<double>> pts(dim + 1, start);
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= dim; ++i) {
        vals[i] = f(pts[i]);
        ++result.evaluations;
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&vals](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order[0], worst = order[dim];
        const std::size_t second_worst = order[dim - 1];

        if (std::fabs(vals[worst] - vals[best]) <=
            tol * std::max(std::fabs(vals[best]), 1e-300)) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        // Reflection.
        for (std::size_t j = 0; j < dim; ++j) trial[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        double f_trial = f(trial);
        ++result.evaluations;

        if (f_trial < vals[best]) {
            // Expansion.
            for (std::size_t j = 0; j < dim; ++j) trial2[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            const double f_exp = f(trial2);
            ++result.evaluations;
            if (f_exp < f_trial) {
                pts[worst] = trial2;
                vals[worst] = f_exp;
            } else {
                pts[worst] = trial;
                vals[worst] = f_trial;
            }
        } else if (f_trial < vals[second_worst]) {
            pts[worst] = trial;
            vals[worst] = f_trial;
        } else {
            // Contraction (outside if the reflected point improved on the worst).
            const bool outside = f_trial < vals[worst];
            for (std::size_t j = 0; j < dim; ++j) {
                trial2[j] = outside ? centroid[j] + 0.5 * (trial[j] - centroid[j])
                                    : centroid[j] - 0.5 * (centroid[j] - pts[worst][j]);
            }
            const double f_con = f(trial2);
            ++result.evaluations;
            if (f_con < std::min(f_trial, vals[worst])) {
                pts[worst] = trial2;
                vals[worst] = f_con;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < dim; ++j) {
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    }
                    vals[i] = f(pts[i]);
                    ++result.evaluations;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    result.x = pts[best];
    result.value = vals[best];
    return result;
}

}  // namespace modkit
