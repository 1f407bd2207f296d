#include "aop/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aop {

namespace {

std::string upper(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    return out;
}

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

} // namespace

std::string_view to_string(Mode mode) noexcept
{
    return mode == Mode::DR ? "DR" : "MA";
}

std::string_view to_string(Discipline discipline) noexcept
{
    switch (discipline) {
    case Discipline::MM1: return "MM1";
    case Discipline::DM1: return "DM1";
    case Discipline::MD1: return "MD1";
    case Discipline::DD1: return "DD1";
    }
    return "?";
}

Mode parse_mode(std::string_view text)
{
    const auto u = upper(text);
    if (u == "MA") return Mode::MA;
    if (u == "DR") return Mode::DR;
    throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected ma|dr)");
}

Discipline parse_discipline(std::string_view text)
{
    std::string u;
    for (char ch : upper(text))
        if (ch != '/') u.push_back(ch);
    if (u == "MM1") return Discipline::MM1;
    if (u == "DM1") return Discipline::DM1;
    if (u == "MD1") return Discipline::MD1;
    if (u == "DD1") return Discipline::DD1;
    throw std::invalid_argument("unknown discipline '" + std::string(text) + "'");
}

ModelParams::ModelParams(double v, Mode mode, double epsilon, double peb0)
    : v_(v), mode_(mode), epsilon_(mode == Mode::DR ? epsilon : 0.0), peb0_(peb0)
{
    if (!finite_nonnegative(v)) throw std::invalid_argument("speed v must be finite and >= 0");
    if (!finite_nonnegative(epsilon)) throw std::invalid_argument("epsilon must be finite and >= 0");
    if (!finite_nonnegative(peb0)) throw std::invalid_argument("peb0 must be finite and >= 0");
}

QueueParams::QueueParams(Discipline discipline, double lambda, double mu, double p)
    : discipline_(discipline), lambda_(lambda), mu_(mu), p_(p)
{
    if (!(std::isfinite(lambda) && lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(std::isfinite(mu) && mu > 0.0)) throw std::invalid_argument("mu must be > 0");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("polling probability p must lie in (0, 1]");
}

bool QueueParams::is_stable() const noexcept
{
    if (discipline_ == Discipline::DD1) return service_period() <= arrival_period();
    return rho() < 1.0;
}

void QueueParams::require_stable() const
{
    if (is_stable()) return;
    if (discipline_ == Discipline::DD1)
        throw StabilityError("D/D/1 requires D_s <= D_a (lambda <= mu)");
    throw StabilityError(std::string(to_string(discipline_)) + " requires rho = p*lambda/mu < 1, got rho = " +
                         std::to_string(rho()));
}

double normalize_angle(double theta) noexcept
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(theta, two_pi);
    if (r <= 0.0) r += two_pi;
    return r;
}

double kappa(const ModelParams& params) noexcept
{
    if (params.mode() == Mode::MA) return 1.0;
    return params.epsilon() * params.epsilon() / 3.0;
}

double hop_error_factor(const ModelParams& params, double delta_err) noexcept
{
    if (params.mode() == Mode::MA) return 1.0;
    // 1 + c^2 - 2c cos(delta) with c = 1, written to avoid cancellation.
    const double s = std::sin(0.5 * delta_err);
    return 4.0 * s * s;
}

double peb_excess(std::span<const double> completed_hops, double tau, const ModelParams& params)
{
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("peb_excess: tau must be finite and >= 0");
    double sum_sq = tau * tau;
    for (double y : completed_hops) {
        if (!(y >= 0.0) || !std::isfinite(y)) throw std::invalid_argument("peb_excess: hop durations must be >= 0");
        sum_sq += y * y;
    }
    return kappa(params) * params.v() * params.v() * sum_sq;
}

} // namespace aop
