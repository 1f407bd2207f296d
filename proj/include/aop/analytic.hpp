#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "aop/core_model.hpp"
#include "aop/md1_waiting.hpp"

namespace aop {

/// Mean cycle-area components E[G1], E[G2], E[G3], their sum E[Q], and
/// AoP = p kappa lambda E[Q].
struct AopBreakdown {
    double e_g1 = 0.0;
    double e_g2 = 0.0;
    double e_g3 = 0.0;
    double e_q = 0.0;
    double aop = 0.0;
    Discipline discipline = Discipline::MM1;
    ModelParams model;
    QueueParams queue{Discipline::MM1, 1.0, 1.0, 1.0};
};

struct BetaSolution {
    double beta = 0.0;
    double residual = 0.0;
};

// Closed forms. Each requires the matching discipline and a stable queue.
AopBreakdown aop_mm1(const ModelParams& model, const QueueParams& queue);
AopBreakdown aop_dd1(const ModelParams& model, const QueueParams& queue);
AopBreakdown aop_dm1(const ModelParams& model, const QueueParams& queue);

/// M/D/1: three closed terms plus sum_k p (1-p)^{k-1} T(k), truncated once
/// the tail envelope drops below tol times the partial series.
AopBreakdown aop_md1(const ModelParams& model, const QueueParams& queue, double tol = 1e-8);

/// Dispatches on queue.discipline().
AopBreakdown aop_analytic(const ModelParams& model, const QueueParams& queue, double md1_tol = 1e-8);

/// Root in (0, 1) of beta = p e^{-mu(1-beta)D_a} / (1 - (1-p) e^{-mu(1-beta)D_a})
/// by bisection. The default bracket is [0, 1 - delta] with delta shrunk
/// until the residual changes sign.
BetaSolution solve_beta(const QueueParams& queue);
BetaSolution solve_beta(const QueueParams& queue, double lo, double hi);

/// beta - RHS(beta).
double beta_residual(const QueueParams& queue, double beta) noexcept;

/// M/D/1 waiting-time CDF at w (closed-form series).
double fw_cdf(double w, const QueueParams& queue);

/// E[(W + D_s - s)^+], via the tabulated tail integral.
double g_of_s(double s, const QueueParams& queue);

/// Same quantity by numerically differentiating the series CDF and
/// integrating (w + D_s - s) f_W(w), atom at zero included.
double g_of_s_fd(double s, const QueueParams& queue);

/// k-fold integral T(k), reduced to one dimension through
/// E[sum Y_j^2 | sum Y_j = s] = 2 s^2 / (k + 1):
/// T(k) = (2 k v^2 / lambda^2) E[g(S)], S ~ Erlang(k + 2, lambda).
double t_k(std::size_t k, const ModelParams& model, const QueueParams& queue);
double t_k(std::size_t k, const ModelParams& model, const QueueParams& queue, const Md1WaitingTime& waiting);

/// Upper bound on sum_{j>K} p (1-p)^{j-1} T(j) from g <= g(0).
double md1_tail_envelope(std::size_t K, const ModelParams& model, const QueueParams& queue, double g0);

struct OptimizeOptions {
    double p_min = 0.01;
    std::size_t grid_points = 60;
    double x_tol = 1e-5;
    double md1_tol = 1e-8;
};

struct OptimalPoll {
    double p = 0.0;
    double aop = 0.0;
    bool at_boundary = false;
    std::vector<std::pair<double, double>> grid; // (p, aop) scan
};

inline constexpr double max_search_rho = 0.995;

/// Upper end of the p search: 1 for D/D/1 (lambda <= mu), otherwise the p
/// with rho = max_search_rho, capped at 1.
double max_stable_p(const QueueParams& queue_template);

/// Grid scan over [p_min, p_max] then golden-section refinement on the
/// bracket around the best grid point. Returns p = 1 when the minimum sits on
/// the p = 1 boundary (D/D/1 with lambda <= mu).
OptimalPoll optimal_p(const ModelParams& model, const QueueParams& queue_template,
                      const OptimizeOptions& options = {});

} // namespace aop
