#include "aop/analytic.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aop/quadrature.hpp"
#include "aop/stats.hpp"

namespace aop {

namespace {

void require_discipline(const QueueParams& queue, Discipline expected)
{
    if (queue.discipline() != expected)
        throw std::invalid_argument("evaluator for " + std::string(to_string(expected)) + " called with " +
                                    std::string(to_string(queue.discipline())));
}

AopBreakdown finish(const ModelParams& model, const QueueParams& queue, double g1, double g2, double g3)
{
    AopBreakdown b;
    b.e_g1 = g1;
    b.e_g2 = g2;
    b.e_g3 = g3;
    b.e_q = g1 + g2 + g3;
    b.aop = queue.p() * kappa(model) * queue.lambda() * b.e_q;
    b.discipline = queue.discipline();
    b.model = model;
    b.queue = queue;
    return b;
}

// Sampling-only areas under exponential hops.
std::pair<double, double> markov_sampling_terms(double v2, double lambda, double p)
{
    const double l3 = lambda * lambda * lambda;
    return {2.0 * v2 / (p * l3), 2.0 * v2 * (1.0 - p) / (p * p * l3)};
}

// Sampling-only areas under constant hops D_a.
std::pair<double, double> deterministic_sampling_terms(double v2, double da, double p)
{
    const double d3 = da * da * da;
    return {v2 * d3 / (3.0 * p), v2 * d3 * (1.0 - p) / (p * p)};
}

} // namespace

AopBreakdown aop_mm1(const ModelParams& model, const QueueParams& queue)
{
    require_discipline(queue, Discipline::MM1);
    queue.require_stable();
    const double v2 = model.v() * model.v();
    const double lambda = queue.lambda();
    const double mu = queue.mu();
    const double p = queue.p();
    const double rho = queue.rho();

    const auto [g1, g2] = markov_sampling_terms(v2, lambda, p);
    const double drain = mu * (1.0 - rho); // response-time rate
    const double rho_e = lambda / (drain + lambda);
    const double denom = 1.0 - rho_e * (1.0 - p);
    const double service = 2.0 * v2 / (p * lambda * lambda * mu);
    const double waiting =
        2.0 * v2 * p * rho_e / (drain * (drain + lambda) * (drain + lambda) * denom * denom);
    return finish(model, queue, g1, g2, service + waiting);
}

AopBreakdown aop_dd1(const ModelParams& model, const QueueParams& queue)
{
    require_discipline(queue, Discipline::DD1);
    queue.require_stable();
    const double v2 = model.v() * model.v();
    const double da = queue.arrival_period();
    const double p = queue.p();
    const auto [g1, g2] = deterministic_sampling_terms(v2, da, p);
    return finish(model, queue, g1, g2, v2 * da * da * queue.service_period() / p);
}

double beta_residual(const QueueParams& queue, double beta) noexcept
{
    const double p = queue.p();
    const double z = std::exp(-queue.mu() * (1.0 - beta) * queue.arrival_period());
    return beta - p * z / (1.0 - (1.0 - p) * z);
}

BetaSolution solve_beta(const QueueParams& queue, double lo, double hi)
{
    if (!(queue.rho() < 1.0)) throw StabilityError("beta root requires p*lambda < mu");
    if (!(lo < hi) || lo < 0.0 || hi >= 1.0) throw std::invalid_argument("beta bracket must satisfy 0 <= lo < hi < 1");
    double r_lo = beta_residual(queue, lo);
    double r_hi = beta_residual(queue, hi);
    if (!(r_lo < 0.0 && r_hi > 0.0))
        throw StabilityError("no sign change of the beta residual on the bracket");

    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double r = beta_residual(queue, mid);
        if (r == 0.0) return {mid, 0.0};
        if (r < 0.0) {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
            r_hi = r;
        }
    }
    return std::abs(r_lo) <= std::abs(r_hi) ? BetaSolution{lo, std::abs(r_lo)} : BetaSolution{hi, std::abs(r_hi)};
}

BetaSolution solve_beta(const QueueParams& queue)
{
    if (!(queue.rho() < 1.0)) throw StabilityError("beta root requires p*lambda < mu");
    double delta = 1e-3;
    while (!(beta_residual(queue, 1.0 - delta) > 0.0)) {
        delta *= 0.1;
        if (delta < 1e-15) throw StabilityError("beta residual has no sign change below 1 (near-critical load)");
    }
    // exp(-mu D_a) underflowed: the root is below the smallest double
    if (beta_residual(queue, 0.0) == 0.0) return BetaSolution{0.0, 0.0};
    return solve_beta(queue, 0.0, 1.0 - delta);
}

AopBreakdown aop_dm1(const ModelParams& model, const QueueParams& queue)
{
    require_discipline(queue, Discipline::DM1);
    queue.require_stable();
    const double v2 = model.v() * model.v();
    const double da = queue.arrival_period();
    const double mu = queue.mu();
    const double p = queue.p();
    const auto [g1, g2] = deterministic_sampling_terms(v2, da, p);

    const double beta = solve_beta(queue).beta;
    const double drain = mu * (1.0 - beta);
    const double z = std::exp(-drain * da);
    const double denom = 1.0 - (1.0 - p) * z;
    const double g3 = v2 * da * da * (p * z / (drain * denom * denom) + 1.0 / (mu * p));
    return finish(model, queue, g1, g2, g3);
}

double fw_cdf(double w, const QueueParams& queue)
{
    require_discipline(queue, Discipline::MD1);
    return franx_cdf(w, queue);
}

double g_of_s(double s, const QueueParams& queue)
{
    require_discipline(queue, Discipline::MD1);
    return Md1WaitingTime(queue).g(s);
}

double g_of_s_fd(double s, const QueueParams& queue)
{
    require_discipline(queue, Discipline::MD1);
    queue.require_stable();
    const double rho = queue.rho();
    const double ds = queue.service_period();
    const double mean_w = rho * ds / (2.0 * (1.0 - rho));
    const double a = s - ds;
    if (a <= 0.0) return mean_w + ds - s;

    // int_0^a (w - a) f_W(w) dw over the continuous part; f_W has jumps at
    // multiples of D_s, so each service period is its own Gauss-Legendre panel.
    using boost::math::quadrature::gauss;
    double continuous = 0.0;
    for (double lo = 0.0; lo < a; lo += ds) {
        const double hi = std::min(lo + ds, a);
        // fourth-order central difference; 2h stays clear of the panel ends
        const double h = std::min(1e-3 * ds, 4e-4 * (hi - lo));
        auto integrand = [&](double w) {
            const double d1 = franx_cdf(w + h, queue) - franx_cdf(w - h, queue);
            const double d2 = franx_cdf(w + 2.0 * h, queue) - franx_cdf(w - 2.0 * h, queue);
            return (w - a) * (8.0 * d1 - d2) / (12.0 * h);
        };
        continuous += gauss<double, 30>::integrate(integrand, lo, hi);
    }
    const double atom = (1.0 - rho) * (0.0 - a);
    return std::max(mean_w + ds - s - (atom + continuous), 0.0);
}

double t_k(std::size_t k, const ModelParams& model, const QueueParams& queue, const Md1WaitingTime& waiting)
{
    if (k == 0) throw std::invalid_argument("t_k requires k >= 1");
    const double v2 = model.v() * model.v();
    if (v2 == 0.0) return 0.0;
    const double lambda = queue.lambda();
    const double ds = queue.service_period();
    const double shape = static_cast<double>(k) + 2.0;
    const double scale = 2.0 * static_cast<double>(k) * v2 / (lambda * lambda);

    const double abs_tol = 1e-10 / scale;
    const double lo = boost::math::gamma_p_inv(shape, 1e-17) / lambda;
    double hi = boost::math::gamma_q_inv(shape, 1e-17) / lambda;

    // g is nonincreasing, so the integral beyond a point where g is
    // negligible is bounded by g there.
    const double negligible = 1e-3 * abs_tol;
    if (waiting.g(hi) < negligible) {
        double a = 0.0, b = hi;
        while (b - a > 1e-3 * ds) {
            const double mid = 0.5 * (a + b);
            (waiting.g(mid) < negligible ? b : a) = mid;
        }
        hi = b;
    }
    if (hi <= lo) return 0.0;

    std::vector<double> breaks{lo};
    for (double s = (std::floor(lo / ds) + 1.0) * ds; s < hi; s += ds) breaks.push_back(s);
    breaks.push_back(hi);

    auto integrand = [&](double s) {
        return waiting.g(s) * lambda * boost::math::gamma_p_derivative(shape, lambda * s);
    };
    const auto r = integrate_pieces(integrand, breaks, abs_tol);
    return scale * r.value;
}

double t_k(std::size_t k, const ModelParams& model, const QueueParams& queue)
{
    require_discipline(queue, Discipline::MD1);
    queue.require_stable();
    return t_k(k, model, queue, Md1WaitingTime(queue));
}

double md1_tail_envelope(std::size_t K, const ModelParams& model, const QueueParams& queue, double g0)
{
    const double v2 = model.v() * model.v();
    const double lambda = queue.lambda();
    const double p = queue.p();
    const double q = 1.0 - p;
    const double qk = std::pow(q, static_cast<double>(K));
    // p * sum_{j>K} j q^{j-1}
    const double weight = ((static_cast<double>(K) + 1.0) * qk * p + qk * q) / p;
    return 2.0 * v2 * g0 / (lambda * lambda) * weight;
}

AopBreakdown aop_md1(const ModelParams& model, const QueueParams& queue, double tol)
{
    require_discipline(queue, Discipline::MD1);
    queue.require_stable();
    if (!(tol > 0.0)) throw std::invalid_argument("aop_md1 tolerance must be positive");

    const double v2 = model.v() * model.v();
    const double lambda = queue.lambda();
    const double p = queue.p();
    const double ds = queue.service_period();
    const auto [g1, g2] = markov_sampling_terms(v2, lambda, p);
    const double service = 2.0 * v2 * ds / (p * lambda * lambda);

    const Md1WaitingTime waiting(queue);
    const double g0 = waiting.g(0.0);
    constexpr std::size_t max_terms = 200'000;

    CompensatedSum series;
    double weight = p;
    for (std::size_t k = 1;; ++k) {
        series += weight * t_k(k, model, queue, waiting);
        const double envelope = md1_tail_envelope(k, model, queue, g0);
        if (envelope <= tol * series.value()) break;
        if (k >= max_terms)
            throw ConvergenceError("M/D/1 series did not reach tolerance within " + std::to_string(max_terms) +
                                   " terms");
        weight *= 1.0 - p;
    }
    return finish(model, queue, g1, g2, service + series.value());
}

AopBreakdown aop_analytic(const ModelParams& model, const QueueParams& queue, double md1_tol)
{
    switch (queue.discipline()) {
    case Discipline::MM1: return aop_mm1(model, queue);
    case Discipline::DM1: return aop_dm1(model, queue);
    case Discipline::MD1: return aop_md1(model, queue, md1_tol);
    case Discipline::DD1: return aop_dd1(model, queue);
    }
    throw std::invalid_argument("unknown discipline");
}

double max_stable_p(const QueueParams& queue_template)
{
    if (queue_template.discipline() == Discipline::DD1) {
        if (queue_template.lambda() > queue_template.mu())
            throw StabilityError("D/D/1 requires lambda <= mu for every p");
        return 1.0;
    }
    // AoP diverges as rho -> 1, and the M/D/1 tail needs O(1/(1-rho)) service
    // periods to tabulate, so the search stops at rho = max_search_rho.
    const double ratio = queue_template.mu() / queue_template.lambda();
    return std::min(1.0, ratio * max_search_rho);
}

OptimalPoll optimal_p(const ModelParams& model, const QueueParams& queue_template, const OptimizeOptions& options)
{
    const double p_max = max_stable_p(queue_template);
    const double p_min = options.p_min;
    if (!(p_min > 0.0 && p_min < p_max)) throw std::invalid_argument("optimal_p: need 0 < p_min < p_max");
    const std::size_t n = std::max<std::size_t>(options.grid_points, 3);

    auto eval = [&](double p) { return aop_analytic(model, queue_template.with_p(p), options.md1_tol).aop; };

    OptimalPoll out;
    out.grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = i + 1 == n ? p_max : p_min + (p_max - p_min) * static_cast<double>(i) / (n - 1);
        out.grid.emplace_back(p, eval(p));
    }
    const auto best = std::min_element(out.grid.begin(), out.grid.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    const auto idx = static_cast<std::size_t>(best - out.grid.begin());
    out.p = best->first;
    out.aop = best->second;
    if (idx == 0 || idx + 1 == n) {
        out.at_boundary = true;
        return out;
    }

    // golden-section on the bracketing grid cell pair
    constexpr double inv_phi = 0.6180339887498949;
    double a = out.grid[idx - 1].first;
    double b = out.grid[idx + 1].first;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > options.x_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    const double p_star = 0.5 * (a + b);
    const double f_star = eval(p_star);
    if (f_star < out.aop) {
        out.p = p_star;
        out.aop = f_star;
    }
    return out;
}

} // namespace aop
