#pragma once

#include "nlstiff/chain_model.hpp"

#include <functional>

namespace nlstiff {

struct NelderMeadOptions {
    double initial_step = 0.1;  // simplex edge length around the start point
    double x_tolerance = 1e-10;
    double f_tolerance = 1e-14;
    int max_evaluations = 20000;
};

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Derivative-free simplex minimization. The objective may return +infinity
// for infeasible points; such vertices are always rejected in favour of
// finite ones. In one dimension the simplex degenerates to a bracketing pair.
NelderMeadResult minimize_nelder_mead(const std::function<double(const Vector&)>& objective,
                                      const Vector& start, const NelderMeadOptions& options = {});

}  // namespace nlstiff
