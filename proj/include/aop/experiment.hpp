#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aop/analytic.hpp"
#include "aop/core_model.hpp"
#include "aop/simulation.hpp"

namespace aop {

inline constexpr std::string_view kResultCsvHeader =
    "discipline,p,rho,kappa,aop_analytic,aop_sim_mean,aop_sim_ci95,n_cycles,horizon,seed,status";

inline constexpr std::string_view kConfigEnvVar = "AOP_CONFIG";

/// Inclusive grid min, min+step, ..., max (max is kept if within step/1e6).
struct PGrid {
    double min = 0.05;
    double max = 0.95;
    double step = 0.05;

    static PGrid parse(std::string_view text); // "min:max:step"
    std::vector<double> values() const;
};

struct ExperimentConfig {
    double v = 5.0;
    Mode mode = Mode::MA;
    double epsilon = 0.0;
    double peb0 = 0.0;

    double lambda = 20.0;
    double mu = 20.0;
    std::vector<Discipline> disciplines{Discipline::MM1, Discipline::DM1, Discipline::MD1, Discipline::DD1};
    std::vector<double> p_values = PGrid{}.values();

    SimulationOptions sim;
    double md1_tol = 1e-8;
    OptimizeOptions optimize;

    std::string out;      // CSV path; empty = stdout
    std::string json_out; // optional JSON mirror
    std::string plot_out; // optional plot description

    ModelParams model() const { return ModelParams(v, mode, epsilon, peb0); }
    QueueParams queue(Discipline d, double p) const { return QueueParams(d, lambda, mu, p); }

    /// Throws std::invalid_argument on an empty discipline list, a grid value
    /// outside (0, 1], zero replications or a horizon not beyond warm-up.
    void validate() const;
};

/// Reads an INI file with sections [model], [queue], [simulation],
/// [analytic] and [output] into `config`; keys not present keep their value.
void apply_config_file(ExperimentConfig& config, const std::string& path);

/// Path named by AOP_CONFIG, if set and non-empty.
std::optional<std::string> default_config_path();

struct ResultRow {
    Discipline discipline = Discipline::MM1;
    double p = 0.0;
    double rho = 0.0;
    double kappa = 0.0;
    std::optional<AopBreakdown> analytic;
    std::optional<AopEstimate> sim;
    double sim_se = 0.0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    bool fatal = false;

    std::optional<double> z_score() const;
};

/// Seed of the (d, p) grid point; independent of grid order.
std::uint64_t point_seed(std::uint64_t master, Discipline d, double p) noexcept;

std::vector<ResultRow> cmd_analytic(const ExperimentConfig& config);
std::vector<ResultRow> cmd_simulate(const ExperimentConfig& config);
std::vector<ResultRow> cmd_sweep(const ExperimentConfig& config, bool with_simulation);

struct OptimizeRow {
    Discipline discipline = Discipline::MM1;
    std::optional<OptimalPoll> result;
    std::string status = "ok";
    bool fatal = false;
};

std::vector<OptimizeRow> cmd_optimize(const ExperimentConfig& config);

bool any_fatal(std::span<const ResultRow> rows) noexcept;
bool any_fatal(std::span<const OptimizeRow> rows) noexcept;

void write_csv(std::ostream& os, std::span<const ResultRow> rows);
void write_json(std::ostream& os, std::span<const ResultRow> rows, const ExperimentConfig& config);
void write_optimize_csv(std::ostream& os, std::span<const OptimizeRow> rows);
void write_optimize_json(std::ostream& os, std::span<const OptimizeRow> rows);

/// Declarative description of the AoP-vs-p figure over `csv_path`.
void write_plot_spec(std::ostream& os, const std::string& csv_path, const ExperimentConfig& config);

} // namespace aop
