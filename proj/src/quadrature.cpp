#include "fracinv/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace fracinv {

namespace {

struct SimpsonWorker {
    const std::function<double(double)>& f;
    QuadResult out;
    std::int64_t evals_left;

    // a < m < b with fa/fm/fb already evaluated; whole = Simpson on [a,b].
    void refine(double a, double b, double fa, double fm, double fb, double whole,
                double tol, int depth)
    {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        evals_left -= 2;
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;

        // Roundoff floor: once the correction is at noise level relative to the
        // local magnitude, further splitting only burns evaluations.
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(left) + std::abs(right) + std::abs(whole));
        const bool accept = std::abs(delta) <= 15.0 * tol || std::abs(delta) <= noise;
        if (accept || depth <= 0 || evals_left <= 0) {
            out.value += left + right + delta / 15.0;
            out.err_estimate += std::abs(delta) / 15.0;
            if (!accept) {
                out.converged = false;
            }
            return;
        }
        refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

} // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double tol, int max_depth)
{
    QuadResult zero;
    if (!(a < b)) {
        return zero;
    }
    SimpsonWorker worker{f, {}, 4'000'000};
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    worker.refine(a, b, fa, fm, fb, whole, tol, max_depth);
    return worker.out;
}

} // namespace fracinv
