#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace aop {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// One batch of a ratio estimator: accumulated area over accumulated time.
struct RatioBatch {
    double area = 0.0;
    double length = 0.0;
};

/// Two-sided 97.5% Student-t quantile.
double student_t_975(std::size_t dof);

/// 95% half-width of sum(area)/sum(length) from batch means (delta method,
/// Student-t with n-1 degrees of freedom). Zero when fewer than two batches.
double ratio_ci95_halfwidth(std::span<const RatioBatch> batches);

} // namespace aop
