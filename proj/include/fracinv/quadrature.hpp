#pragma once

#include <functional>

namespace fracinv {

struct QuadResult {
    double value = 0.0;
    double err_estimate = 0.0;
    bool converged = true;

    QuadResult& operator+=(const QuadResult& other)
    {
        value += other.value;
        err_estimate += other.err_estimate;
        converged = converged && other.converged;
        return *this;
    }
};

/// Adaptive Simpson integration of f over [a, b].
///
/// Accepts integrands with mild endpoint singularities (the bisection keeps
/// refining toward the bad endpoint). If max_depth is exhausted somewhere the
/// partial result is still accumulated and `converged` is cleared, with
/// err_estimate reporting the achieved tolerance.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double tol, int max_depth = 52);

} // namespace fracinv
