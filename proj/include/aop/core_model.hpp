#pragma once

#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aop {

/// Estimation mode of the agent: motion agnostic (c = 0) or dead-reckoning
/// aided (c = 1).
enum class Mode { MA, DR };

/// FCFS queue discipline; first letter is the hop/arrival process, second the
/// service process.
enum class Discipline { MM1, DM1, MD1, DD1 };

class StabilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(Discipline discipline) noexcept;
Mode parse_mode(std::string_view text);
Discipline parse_discipline(std::string_view text);

constexpr bool markovian_arrivals(Discipline d) noexcept
{
    return d == Discipline::MM1 || d == Discipline::MD1;
}

constexpr bool markovian_service(Discipline d) noexcept
{
    return d == Discipline::MM1 || d == Discipline::DM1;
}

/// Agent motion and estimation-mode parameters. Immutable once built.
class ModelParams {
public:
    /// v in m/s, epsilon in radians (DR sensor error half-width), peb0 in m^2.
    /// Throws std::invalid_argument on negative or non-finite values.
    explicit ModelParams(double v = 5.0, Mode mode = Mode::MA, double epsilon = 0.0,
                         double peb0 = 0.0);

    double v() const noexcept { return v_; }
    Mode mode() const noexcept { return mode_; }
    double epsilon() const noexcept { return epsilon_; }
    double peb0() const noexcept { return peb0_; }

    /// c = 0 for MA, 1 for DR.
    double c() const noexcept { return mode_ == Mode::DR ? 1.0 : 0.0; }

    ModelParams with_mode(Mode mode, double epsilon) const
    {
        return ModelParams(v_, mode, epsilon, peb0_);
    }
    ModelParams with_speed(double v) const { return ModelParams(v, mode_, epsilon_, peb0_); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    double v_;
    Mode mode_;
    double epsilon_;
    double peb0_;
};

/// Arrival/service rates and polling probability of the update queue.
///
/// Range checks (lambda, mu > 0, 0 < p <= 1) happen at construction.
/// Stability is a property of the configuration, queried with is_stable()
/// and enforced by the analytic evaluators through require_stable(), so that
/// sweeps can report an unstable grid point instead of aborting.
class QueueParams {
public:
    QueueParams(Discipline discipline, double lambda, double mu, double p);

    Discipline discipline() const noexcept { return discipline_; }
    double lambda() const noexcept { return lambda_; }
    double mu() const noexcept { return mu_; }
    double p() const noexcept { return p_; }

    double rho() const noexcept { return p_ * lambda_ / mu_; }
    double arrival_period() const noexcept { return 1.0 / lambda_; } // D_a
    double service_period() const noexcept { return 1.0 / mu_; }     // D_s
    double polled_rate() const noexcept { return p_ * lambda_; }

    bool is_stable() const noexcept;
    void require_stable() const;

    QueueParams with_p(double p) const { return QueueParams(discipline_, lambda_, mu_, p); }
    QueueParams with_discipline(Discipline d) const { return QueueParams(d, lambda_, mu_, p_); }

    friend bool operator==(const QueueParams&, const QueueParams&) = default;

private:
    Discipline discipline_;
    double lambda_;
    double mu_;
    double p_;
};

/// One RWP hop. `polled` marks the update generated at the waypoint that
/// starts this hop.
struct HopRecord {
    double duration = 0.0;  // seconds
    double theta = 0.0;     // true heading, (0, 2pi]
    double delta_err = 0.0; // DR heading error, |delta_err| <= epsilon
    bool polled = false;
};

/// Maps any finite angle onto (0, 2pi].
double normalize_angle(double theta) noexcept;

/// Squared-displacement growth factor: 1 for MA, eps^2/3 for DR.
double kappa(const ModelParams& params) noexcept;

/// Exact per-hop squared-error factor 1 + c^2 - 2c cos(delta) of a single
/// hop with realised heading error delta. kappa() is its small-angle mean.
double hop_error_factor(const ModelParams& params, double delta_err) noexcept;

/// PEB(t) - PEB0 = kappa v^2 (sum Y_j^2 + tau^2), where the hops are those
/// completed since the generation waypoint of the freshest available update
/// and tau is the time spent in the current hop.
double peb_excess(std::span<const double> completed_hops, double tau, const ModelParams& params);

} // namespace aop
