#include "aop/md1_waiting.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aop/stats.hpp"

namespace aop {

namespace {

constexpr std::size_t N = Md1WaitingTime::degree;
constexpr double table_floor = 1e-14;
constexpr std::size_t max_pieces = 5'000'000;

using Nodes = std::array<double, N + 1>;
using Coeffs = std::array<double, N + 2>;

// Chebyshev-Lobatto points t_i = cos(pi i / N); t_0 = 1.
const Nodes& lobatto()
{
    static const Nodes t = [] {
        Nodes out{};
        for (std::size_t i = 0; i <= N; ++i) out[i] = std::cos(std::numbers::pi * static_cast<double>(i) / N);
        return out;
    }();
    return t;
}

Coeffs to_chebyshev(const Nodes& values)
{
    Coeffs a{};
    for (std::size_t k = 0; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i <= N; ++i) {
            const double w = (i == 0 || i == N) ? 0.5 : 1.0;
            s += w * values[i] * std::cos(std::numbers::pi * static_cast<double>(k * i) / N);
        }
        a[k] = 2.0 * s / N;
    }
    a[0] *= 0.5;
    a[N] *= 0.5;
    return a;
}

// Antiderivative in t with B_0 = 0.
Coeffs antiderivative(const Coeffs& a)
{
    auto c = [&](std::size_t k) -> double {
        if (k > N) return 0.0;
        return k == 0 ? 2.0 * a[0] : a[k];
    };
    Coeffs b{};
    for (std::size_t k = 1; k <= N + 1; ++k) b[k] = (c(k - 1) - c(k + 1)) / (2.0 * static_cast<double>(k));
    return b;
}

double clenshaw(const Coeffs& a, double t) noexcept
{
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = a.size() - 1; k >= 1; --k) {
        const double b0 = 2.0 * t * b1 - b2 + a[k];
        b2 = b1;
        b1 = b0;
    }
    return a[0] + t * b1 - b2;
}

double sum_coeffs(const Coeffs& a) noexcept
{
    double s = 0.0;
    for (double x : a) s += x;
    return s;
}

// Positive root of rho (e^x - 1) = x.
double decay_root(double rho)
{
    auto phi = [rho](double x) { return rho * std::expm1(x) - x; };
    double hi = 1.0;
    while (phi(hi) <= 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

template <class Real>
double franx_sum(double w, double rate, double period, long m)
{
    using std::exp;
    using std::log;
    const Real wr(w), dr(period), lr(rate);
    Real sum(0), log_fact(0);
    for (long k = 0; k <= m; ++k) {
        if (k > 0) log_fact += log(Real(k));
        Real x = lr * (wr - Real(k) * dr);
        if (x <= 0) {
            if (k == 0) sum += 1;
            continue;
        }
        const Real mag = exp(x + Real(k) * log(x) - log_fact);
        if (k % 2 == 0)
            sum += mag;
        else
            sum -= mag;
    }
    return static_cast<double>(sum);
}

double franx_sum_double(double w, double rate, double period, long m)
{
    CompensatedSum sum;
    double log_fact = 0.0;
    for (long k = 0; k <= m; ++k) {
        if (k > 0) log_fact += std::log(static_cast<double>(k));
        const double x = rate * (w - static_cast<double>(k) * period);
        if (x <= 0.0) {
            if (k == 0) sum += 1.0;
            continue;
        }
        const double mag = std::exp(x + static_cast<double>(k) * std::log(x) - log_fact);
        sum += (k % 2 == 0) ? mag : -mag;
    }
    return sum.value();
}

template <unsigned Digits>
using wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                           boost::multiprecision::et_off>;

} // namespace

Md1WaitingTime::Md1WaitingTime(const QueueParams& queue)
    : rate_(queue.polled_rate()), period_(queue.service_period()), rho_(queue.rho())
{
    if (!(rho_ < 1.0)) throw StabilityError("M/D/1 waiting time requires rho < 1");
    mean_ = rho_ * period_ / (2.0 * (1.0 - rho_));
    gamma_ = decay_root(rho_) / period_;

    const auto& t = lobatto();
    Nodes x{}, grow{}, shrink{};
    for (std::size_t i = 0; i <= N; ++i) {
        x[i] = 0.5 * period_ * (1.0 - t[i]);
        grow[i] = std::exp(rate_ * x[i]);
        shrink[i] = 1.0 / grow[i];
    }

    const double asymptotic_ratio = std::exp(-gamma_ * period_);
    Nodes prev;
    prev.fill(1.0); // G(w) = 1 for w < 0
    double start_value = rho_;
    double cumulative = 0.0;
    const double half = 0.5 * period_;

    while (true) {
        Nodes h{};
        for (std::size_t i = 0; i <= N; ++i) h[i] = shrink[i] * prev[i];
        const Coeffs hb = antiderivative(to_chebyshev(h));
        const double hb_one = sum_coeffs(hb);

        Nodes vals{};
        for (std::size_t i = 0; i <= N; ++i) {
            const double integral = half * (hb_one - clenshaw(hb, t[i]));
            vals[i] = grow[i] * (start_value - rate_ * integral);
        }
        vals[0] = start_value;

        Piece piece;
        piece.tail = to_chebyshev(vals);
        piece.integral = antiderivative(piece.tail);
        piece.integral_at_one = sum_coeffs(piece.integral);
        piece.cumulative = cumulative;
        cumulative += half * (piece.integral_at_one - clenshaw(piece.integral, -1.0));
        pieces_.push_back(piece);

        const double ratio = vals[N] / start_value;
        start_value = vals[N];
        prev = vals;
        if (start_value < table_floor) break;
        // Subdominant modes have died out once G shrinks by exactly exp(-gamma D)
        // per period; from there on the exponential tail is exact.
        if (pieces_.size() >= 4 && std::abs(ratio - asymptotic_ratio) <= 1e-11 * asymptotic_ratio) break;
        if (pieces_.size() >= max_pieces)
            throw ConvergenceError("M/D/1 waiting-time table did not reach its tail floor");
    }
    end_tail_ = std::max(start_value, 0.0);
    end_excess_ = end_tail_ / gamma_;
    table_integral_ = cumulative;
}

double Md1WaitingTime::piece_integral(const Piece& piece, double u) const noexcept
{
    const double t = 1.0 - 2.0 * u / period_;
    return 0.5 * period_ * (piece.integral_at_one - clenshaw(piece.integral, t));
}

double Md1WaitingTime::tail(double w) const noexcept
{
    if (w < 0.0) return 1.0;
    const double end = static_cast<double>(pieces_.size()) * period_;
    if (w >= end) return end_tail_ * std::exp(-gamma_ * (w - end));
    const auto m = std::min(static_cast<std::size_t>(w / period_), pieces_.size() - 1);
    const double u = std::clamp(w - static_cast<double>(m) * period_, 0.0, period_);
    const double t = 1.0 - 2.0 * u / period_;
    return std::clamp(clenshaw(pieces_[m].tail, t), 0.0, 1.0);
}

double Md1WaitingTime::cdf(double w) const noexcept
{
    if (w < 0.0) return 0.0;
    return 1.0 - tail(w);
}

double Md1WaitingTime::excess_mean(double a) const noexcept
{
    if (a < 0.0) return mean_ - a;
    const double end = static_cast<double>(pieces_.size()) * period_;
    if (a >= end) return end_excess_ * std::exp(-gamma_ * (a - end));
    const auto m = std::min(static_cast<std::size_t>(a / period_), pieces_.size() - 1);
    const double u = std::clamp(a - static_cast<double>(m) * period_, 0.0, period_);
    const double used = pieces_[m].cumulative + piece_integral(pieces_[m], u);
    // integrated from the exact tail inwards: no cancellation against E[W]
    return std::max(end_excess_ + (table_integral_ - used), 0.0);
}

double franx_cancellation_digits(double w, const QueueParams& queue)
{
    if (w <= 0.0) return 0.0;
    const double rate = queue.polled_rate();
    const double period = queue.service_period();
    const auto m = static_cast<long>(std::floor(w / period));
    double best = 0.0;
    double log_fact = 0.0;
    for (long k = 0; k <= m; ++k) {
        if (k > 0) log_fact += std::log(static_cast<double>(k));
        const double x = rate * (w - static_cast<double>(k) * period);
        if (x <= 0.0) continue;
        best = std::max(best, x + static_cast<double>(k) * std::log(x) - log_fact);
    }
    return best / std::numbers::ln10;
}

double franx_cdf(double w, const QueueParams& queue)
{
    const double rho = queue.rho();
    if (!(rho < 1.0)) throw StabilityError("M/D/1 waiting time requires rho < 1");
    if (w < 0.0) return 0.0;
    if (w == 0.0) return 1.0 - rho;

    const double rate = queue.polled_rate();
    const double period = queue.service_period();
    const auto m = static_cast<long>(std::floor(w / period));
    const double lost = franx_cancellation_digits(w, queue) + std::log10(static_cast<double>(m) + 1.0);

    double sum = 0.0;
    if (lost <= 0.5)
        sum = franx_sum_double(w, rate, period, m);
    else if (lost <= 28.0)
        sum = franx_sum<wide<50>>(w, rate, period, m);
    else if (lost <= 78.0)
        sum = franx_sum<wide<100>>(w, rate, period, m);
    else if (lost <= 228.0)
        sum = franx_sum<wide<250>>(w, rate, period, m);
    else if (lost <= 478.0)
        sum = franx_sum<wide<500>>(w, rate, period, m);
    else if (lost <= 978.0)
        sum = franx_sum<wide<1000>>(w, rate, period, m);
    else
        return Md1WaitingTime(queue).cdf(w);

    return std::clamp((1.0 - rho) * sum, 0.0, 1.0);
}

} // namespace aop
