#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "aop/core_model.hpp"

namespace aop {

/// Stationary M/D/1 waiting time W for Poisson(p*lambda) arrivals and
/// deterministic service D_s.
///
/// The CDF obeys the level-crossing equation F'(w) = L (F(w) - F(w - D_s))
/// with F(0) = 1 - rho. The table integrates it for the tail G = 1 - F one
/// service period at a time on Chebyshev-Lobatto nodes; the recursion is
/// stable, unlike the alternating closed-form series, so the tail stays
/// accurate for any w. Past the point where G drops below 1e-14 the exact
/// asymptotic decay exp(-gamma w) is used.
///
/// Immutable after construction; safe to share between threads.
class Md1WaitingTime {
public:
    static constexpr std::size_t degree = 24;

    explicit Md1WaitingTime(const QueueParams& queue);

    double rho() const noexcept { return rho_; }
    double service_period() const noexcept { return period_; }
    double arrival_rate() const noexcept { return rate_; }

    /// E[W] = rho D_s / (2 (1 - rho)).
    double mean() const noexcept { return mean_; }

    /// Asymptotic tail decay rate: L (exp(gamma D_s) - 1) = gamma.
    double decay_rate() const noexcept { return gamma_; }

    /// Number of service periods tabulated before the exponential tail takes over.
    std::size_t intervals() const noexcept { return pieces_.size(); }

    double cdf(double w) const noexcept;
    double tail(double w) const noexcept; // P(W > w)

    /// E[(W - a)^+] for a >= 0; E[W] - a for a < 0. The table reproduces
    /// E[(W)^+] = E[W] at a = 0 only to its accuracy (about 1e-13 relative).
    double excess_mean(double a) const noexcept;

    /// g(s) = E[(W + D_s - s)^+]: expected residual system time of the
    /// previous update after an inter-generation gap s.
    double g(double s) const noexcept { return excess_mean(s - period_); }

private:
    using Coeffs = std::array<double, degree + 2>;

    struct Piece {
        Coeffs tail;     // Chebyshev coefficients of G on this period
        Coeffs integral; // antiderivative coefficients, t-variable
        double integral_at_one = 0.0;
        double cumulative = 0.0; // int_0^{start} G
    };

    double piece_integral(const Piece& piece, double u) const noexcept;

    double rate_;
    double period_;
    double rho_;
    double mean_;
    double gamma_;
    std::vector<Piece> pieces_;
    double end_tail_ = 0.0;   // G at the end of the table
    double end_excess_ = 0.0; // E[(W - end)^+]
    double table_integral_ = 0.0; // int_0^end G
};

/// Closed-form M/D/1 waiting-time CDF as the finite alternating series
/// F(w) = (1 - rho) sum_{k=0}^{floor(w/D_s)} exp(L(w - k D_s)) (-L(w - k D_s))^k / k!.
///
/// Term magnitudes are assessed in log space; when cancellation would cost
/// more than a few digits the sum is carried out in binary floating point
/// wide enough to absorb it. Beyond 1000 digits the table is used.
double franx_cdf(double w, const QueueParams& queue);

/// Decimal digits lost to cancellation in franx_cdf at w (log10 of the
/// largest term).
double franx_cancellation_digits(double w, const QueueParams& queue);

} // namespace aop
