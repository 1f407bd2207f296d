#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <span>
#include <sstream>

#include "aop/core_model.hpp"

namespace aop {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

// Recursive bisection with an absolute error budget per panel.
template <class F>
QuadratureResult adaptive_panel(F& f, double a, double b, double budget, unsigned depth)
{
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double value = gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
    if (err <= budget || err <= 1e-14 * std::abs(value) || depth == 0) return {value, err};
    const double mid = 0.5 * (a + b);
    const auto left = adaptive_panel(f, a, mid, 0.5 * budget, depth - 1);
    const auto right = adaptive_panel(f, mid, b, 0.5 * budget, depth - 1);
    return {left.value + right.value, left.error + right.error};
}

} // namespace detail

/// Adaptive Gauss-Kronrod (21 points) over consecutive breakpoints. Every
/// breakpoint is a forced subdivision, so kinks of the integrand must be
/// listed there. The absolute tolerance is shared evenly between panels.
/// Throws ConvergenceError when the summed error estimate exceeds abs_tol.
template <class F>
QuadratureResult integrate_pieces(F&& f, std::span<const double> breaks, double abs_tol, unsigned max_depth = 12)
{
    QuadratureResult out;
    if (breaks.size() < 2) return out;
    const double per_panel = abs_tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (!(b > a)) continue;
        const auto r = detail::adaptive_panel(f, a, b, per_panel, max_depth);
        out.value += r.value;
        out.error += r.error;
    }
    if (!(out.error <= abs_tol) || !std::isfinite(out.value)) {
        std::ostringstream msg;
        msg << "quadrature did not converge: error estimate " << out.error << " > tolerance " << abs_tol
            << " over [" << breaks.front() << ", " << breaks.back() << "] with " << breaks.size()
            << " breakpoints";
        throw ConvergenceError(msg.str());
    }
    return out;
}

} // namespace aop
