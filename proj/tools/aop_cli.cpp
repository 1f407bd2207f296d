#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aop/aop_estimator.hpp"
#include "aop/experiment.hpp"
#include "aop/mobility.hpp"
#include "aop/rng.hpp"
#include "aop/simulation.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> disciplines;
    double lambda = 0, mu = 0, v = 0, epsilon = 0, horizon = 0, warmup = 0, md1_tol = 0;
    std::vector<double> p;
    std::string p_grid, mode, out, json, plot, updates_out, cycles_out;
    std::size_t reps = 0, cycles = 0, batches = 0;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    bool simulate = false;
};

template <class T>
void set_if(const CLI::Option* opt, T& dst, const T& value)
{
    if (opt->count() > 0) dst = value;
}

class OutFile {
public:
    explicit OutFile(const std::string& path)
    {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

int export_trajectory(const aop::ExperimentConfig& config, const Flags& flags)
{
    const auto model = config.model();
    const auto queue = config.queue(config.disciplines.front(), config.p_values.front());
    const double horizon = config.sim.horizon > 0.0 ? config.sim.horizon : 10.0;
    const auto hops = aop::generate_hops(queue, model, horizon, aop::derive_seed(config.sim.seed, 1));
    aop::Trajectory traj(aop::Point{0.0, 0.0}, hops, model.v());
    OutFile out(config.out);
    traj.write_csv(out.stream());

    if (flags.updates_out.empty() && flags.cycles_out.empty()) return 0;
    const auto epochs = aop::polled_epochs(hops);
    const auto updates = aop::simulate_queue(epochs, queue, aop::derive_seed(config.sim.seed, 2));
    if (!flags.updates_out.empty()) {
        OutFile f(flags.updates_out);
        aop::write_updates_csv(f.stream(), updates);
    }
    if (!flags.cycles_out.empty()) {
        const auto dec = aop::cycle_decompose(hops, updates, model, aop::Window{0.0, horizon});
        OutFile f(flags.cycles_out);
        aop::write_cycles_csv(f.stream(), dec.cycles);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Age of Positioning: closed forms, simulation and sweeps"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    auto* o_config = app.add_option("--config", f.config, "INI config file (default: $AOP_CONFIG)");
    auto* o_disc = app.add_option("--discipline", f.disciplines, "MM1, DM1, MD1, DD1 (comma list)")->delimiter(',');
    auto* o_lambda = app.add_option("--lambda", f.lambda, "update arrival rate (1/s)");
    auto* o_mu = app.add_option("--mu", f.mu, "service rate (1/s)");
    auto* o_p = app.add_option("--p", f.p, "polling probability (comma list)")->delimiter(',');
    auto* o_grid = app.add_option("--p-grid", f.p_grid, "polling grid min:max:step");
    auto* o_v = app.add_option("--v", f.v, "agent speed (m/s)");
    auto* o_mode = app.add_option("--mode", f.mode, "ma | dr");
    auto* o_eps = app.add_option("--epsilon", f.epsilon, "DR heading error bound (rad)");
    auto* o_hor = app.add_option("--horizon", f.horizon, "simulated seconds per replication (0 = auto)");
    auto* o_reps = app.add_option("--reps", f.reps, "replications per grid point");
    auto* o_cyc = app.add_option("--cycles", f.cycles, "target post-warm-up cycles per replication");
    auto* o_bat = app.add_option("--batches", f.batches, "batches per replication for the CI");
    auto* o_seed = app.add_option("--seed", f.seed, "master seed");
    auto* o_warm = app.add_option("--warmup", f.warmup, "warm-up seconds (overrides the default rule)");
    auto* o_thr = app.add_option("--threads", f.threads, "worker threads (0 = all cores)");
    auto* o_tol = app.add_option("--md1-tol", f.md1_tol, "relative truncation tolerance of the M/D/1 series");
    auto* o_out = app.add_option("--out", f.out, "output CSV path ('-' = stdout)");
    auto* o_json = app.add_option("--json", f.json, "optional JSON mirror of the results");
    auto* o_plot = app.add_option("--plot", f.plot, "optional plot description file");

    auto* c_analytic = app.add_subcommand("analytic", "closed-form AoP per (discipline, p)");
    auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo AoP next to the closed form");
    auto* c_sweep = app.add_subcommand("sweep", "AoP over a p grid");
    c_sweep->add_flag("--simulate", f.simulate, "add simulation columns");
    auto* c_optimize = app.add_subcommand("optimize", "AoP-minimising polling probability");
    auto* c_export = app.add_subcommand("export-trajectory", "dump one RWP sample path");
    c_export->add_option("--updates", f.updates_out, "also write the queue records");
    c_export->add_option("--cycles-out", f.cycles_out, "also write the per-cycle areas");

    CLI11_PARSE(app, argc, argv);

    aop::ExperimentConfig config;
    try {
        if (o_config->count() > 0)
            aop::apply_config_file(config, f.config);
        else if (auto env = aop::default_config_path())
            aop::apply_config_file(config, *env);

        if (o_disc->count() > 0) {
            config.disciplines.clear();
            for (const auto& d : f.disciplines)
                if (!d.empty()) config.disciplines.push_back(aop::parse_discipline(d));
        }
        set_if(o_lambda, config.lambda, f.lambda);
        set_if(o_mu, config.mu, f.mu);
        if (o_grid->count() > 0) config.p_values = aop::PGrid::parse(f.p_grid).values();
        set_if(o_p, config.p_values, f.p);
        set_if(o_v, config.v, f.v);
        if (o_mode->count() > 0) config.mode = aop::parse_mode(f.mode);
        set_if(o_eps, config.epsilon, f.epsilon);
        set_if(o_hor, config.sim.horizon, f.horizon);
        set_if(o_reps, config.sim.replications, f.reps);
        set_if(o_cyc, config.sim.cycles_per_replication, f.cycles);
        set_if(o_bat, config.sim.batches, f.batches);
        set_if(o_seed, config.sim.seed, f.seed);
        if (o_warm->count() > 0) config.sim.warmup.seconds = f.warmup;
        set_if(o_thr, config.sim.threads, f.threads);
        if (o_tol->count() > 0) config.md1_tol = f.md1_tol;
        set_if(o_out, config.out, f.out);
        set_if(o_json, config.json_out, f.json);
        set_if(o_plot, config.plot_out, f.plot);
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (c_export->parsed()) return export_trajectory(config, f);

        if (c_optimize->parsed()) {
            const auto rows = aop::cmd_optimize(config);
            OutFile out(config.out);
            aop::write_optimize_csv(out.stream(), rows);
            if (!config.json_out.empty()) {
                OutFile j(config.json_out);
                aop::write_optimize_json(j.stream(), rows);
            }
            return aop::any_fatal(rows) ? 1 : 0;
        }

        std::vector<aop::ResultRow> rows;
        if (c_analytic->parsed())
            rows = aop::cmd_analytic(config);
        else if (c_simulate->parsed())
            rows = aop::cmd_simulate(config);
        else
            rows = aop::cmd_sweep(config, f.simulate);

        {
            OutFile out(config.out);
            aop::write_csv(out.stream(), rows);
        }
        if (!config.json_out.empty()) {
            OutFile j(config.json_out);
            aop::write_json(j.stream(), rows, config);
        }
        if (!config.plot_out.empty()) {
            OutFile p(config.plot_out);
            aop::write_plot_spec(p.stream(), config.out.empty() || config.out == "-" ? "stdout" : config.out, config);
        }
        return aop::any_fatal(rows) ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
