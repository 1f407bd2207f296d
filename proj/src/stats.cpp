#include "aop/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

namespace aop {

double student_t_975(std::size_t dof)
{
    if (dof == 0) return 0.0;
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

double ratio_ci95_halfwidth(std::span<const RatioBatch> batches)
{
    const std::size_t n = batches.size();
    if (n < 2) return 0.0;
    CompensatedSum area, length;
    for (const auto& b : batches) {
        area += b.area;
        length += b.length;
    }
    if (!(length.value() > 0.0)) return 0.0;
    const double r = area.value() / length.value();
    double ss = 0.0;
    for (const auto& b : batches) {
        const double d = b.area - r * b.length;
        ss += d * d;
    }
    const double mean_len = length.value() / static_cast<double>(n);
    const double se = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1))) / mean_len;
    return student_t_975(n - 1) * se;
}

} // namespace aop
