#include "aop/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "aop/rng.hpp"
#include "aop/stats.hpp"

namespace aop {

namespace {

std::string fmt(double x, int digits = 12)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

double parse_double(std::string_view text, std::string_view what)
{
    std::string s(text);
    boost::algorithm::trim(s);
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + s + "'");
    return x;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
    std::erase_if(parts, [](const std::string& s) { return s.empty(); });
    return parts;
}

double clean_grid_value(double x) { return std::round(x * 1e12) / 1e12; }

void fill_analytic(ResultRow& row, const ModelParams& model, const QueueParams& queue, double md1_tol)
{
    try {
        row.analytic = aop_analytic(model, queue, md1_tol);
    } catch (const StabilityError&) {
        row.status = "unstable";
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        row.fatal = true;
    }
}

ResultRow base_row(const ExperimentConfig& config, Discipline d, double p)
{
    ResultRow row;
    row.discipline = d;
    row.p = p;
    row.rho = p * config.lambda / config.mu;
    row.kappa = kappa(config.model());
    row.seed = config.sim.seed;
    return row;
}

struct Point {
    Discipline discipline;
    double p;
};

std::vector<Point> grid_points(const ExperimentConfig& config)
{
    std::vector<Point> pts;
    for (auto d : config.disciplines)
        for (double p : config.p_values) pts.push_back({d, p});
    return pts;
}

nlohmann::json optional_number(const std::optional<double>& x)
{
    if (!x || !std::isfinite(*x)) return nullptr;
    return *x;
}

} // namespace

PGrid PGrid::parse(std::string_view text)
{
    std::vector<std::string> parts;
    std::string s(text);
    boost::algorithm::split(parts, s, boost::is_any_of(":"));
    if (parts.size() != 3) throw std::invalid_argument("p grid must be min:max:step, got '" + s + "'");
    PGrid g{parse_double(parts[0], "grid min"), parse_double(parts[1], "grid max"),
            parse_double(parts[2], "grid step")};
    if (!(g.step > 0.0)) throw std::invalid_argument("grid step must be > 0");
    if (g.max < g.min) throw std::invalid_argument("grid max must be >= min");
    return g;
}

std::vector<double> PGrid::values() const
{
    std::vector<double> out;
    const double slack = step * 1e-6;
    for (std::size_t i = 0;; ++i) {
        const double x = min + static_cast<double>(i) * step;
        if (x > max + slack) break;
        out.push_back(clean_grid_value(std::min(x, max)));
    }
    return out;
}

void ExperimentConfig::validate() const
{
    if (disciplines.empty()) throw std::invalid_argument("discipline list is empty");
    if (p_values.empty()) throw std::invalid_argument("p grid is empty");
    for (double p : p_values)
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("grid value " + fmt(p) + " outside (0, 1]");
    if (sim.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (sim.batches < 2) throw std::invalid_argument("batches must be >= 2");
    (void)model();
    (void)QueueParams(Discipline::MM1, lambda, mu, 1.0);
    if (sim.horizon > 0.0 && sim.warmup.seconds && sim.horizon <= *sim.warmup.seconds)
        throw std::invalid_argument("horizon must exceed the warm-up period");
}

void apply_config_file(ExperimentConfig& c, const std::string& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::invalid_argument("config " + path + ": " + e.message());
    }
    auto get = [&](const char* key) { return tree.get_optional<std::string>(key); };
    auto num = [&](const char* key, double& dst) {
        if (auto s = get(key)) dst = parse_double(*s, key);
    };
    auto count = [&](const char* key, auto& dst) {
        if (auto s = get(key)) {
            const double x = parse_double(*s, key);
            if (x < 0 || x != std::floor(x)) throw std::invalid_argument(std::string(key) + " must be a non-negative integer");
            dst = static_cast<std::remove_reference_t<decltype(dst)>>(x);
        }
    };

    num("model.v", c.v);
    if (auto s = get("model.mode")) c.mode = parse_mode(boost::algorithm::trim_copy(*s));
    num("model.epsilon", c.epsilon);
    num("model.peb0", c.peb0);

    num("queue.lambda", c.lambda);
    num("queue.mu", c.mu);
    if (auto s = get("queue.disciplines")) {
        c.disciplines.clear();
        for (const auto& d : split_list(*s)) c.disciplines.push_back(parse_discipline(d));
    }
    if (auto s = get("queue.p_grid")) c.p_values = PGrid::parse(boost::algorithm::trim_copy(*s)).values();
    if (auto s = get("queue.p")) {
        c.p_values.clear();
        for (const auto& x : split_list(*s)) c.p_values.push_back(parse_double(x, "queue.p"));
    }

    num("simulation.horizon", c.sim.horizon);
    count("simulation.replications", c.sim.replications);
    count("simulation.cycles", c.sim.cycles_per_replication);
    count("simulation.batches", c.sim.batches);
    count("simulation.threads", c.sim.threads);
    count("simulation.seed", c.sim.seed);
    count("simulation.warmup_updates", c.sim.warmup.min_updates);
    if (auto s = get("simulation.warmup")) c.sim.warmup.seconds = parse_double(*s, "simulation.warmup");

    num("analytic.md1_tol", c.md1_tol);
    c.optimize.md1_tol = c.md1_tol;
    num("analytic.p_min", c.optimize.p_min);
    count("analytic.grid_points", c.optimize.grid_points);

    if (auto s = get("output.out")) c.out = boost::algorithm::trim_copy(*s);
    if (auto s = get("output.json")) c.json_out = boost::algorithm::trim_copy(*s);
    if (auto s = get("output.plot")) c.plot_out = boost::algorithm::trim_copy(*s);
}

std::optional<std::string> default_config_path()
{
    const char* env = std::getenv(std::string(kConfigEnvVar).c_str());
    if (env == nullptr || *env == '\0') return std::nullopt;
    return std::string(env);
}

std::optional<double> ResultRow::z_score() const
{
    if (!analytic || !sim) return std::nullopt;
    const double diff = sim->mean - analytic->aop;
    if (sim_se > 0.0) return diff / sim_se;
    if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(analytic->aop))) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

std::uint64_t point_seed(std::uint64_t master, Discipline d, double p) noexcept
{
    return derive_seed(derive_seed(master, static_cast<std::uint64_t>(d)), std::bit_cast<std::uint64_t>(p));
}

std::vector<ResultRow> cmd_analytic(const ExperimentConfig& config)
{
    config.validate();
    const auto model = config.model();
    std::vector<ResultRow> rows;
    for (const auto& pt : grid_points(config)) {
        auto row = base_row(config, pt.discipline, pt.p);
        fill_analytic(row, model, config.queue(pt.discipline, pt.p), config.md1_tol);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> cmd_simulate(const ExperimentConfig& config)
{
    config.validate();
    const auto model = config.model();
    const auto points = grid_points(config);
    std::vector<ResultRow> rows;
    std::vector<SimulationOptions> opts;
    for (const auto& pt : points) {
        auto row = base_row(config, pt.discipline, pt.p);
        const auto queue = config.queue(pt.discipline, pt.p);
        fill_analytic(row, model, queue, config.md1_tol);
        auto o = config.sim;
        o.seed = point_seed(config.sim.seed, pt.discipline, pt.p);
        o.threads = 1;
        if (queue.is_stable()) row.horizon = auto_horizon(queue, o);
        rows.push_back(std::move(row));
        opts.push_back(o);
    }

    // Flatten (point, replication) so the pool stays busy on small grids.
    const std::size_t reps = config.sim.replications;
    std::vector<std::optional<AopEstimate>> reps_out(points.size() * reps);
    std::vector<std::string> errors(points.size() * reps);
    parallel_for(reps_out.size(), config.sim.threads, [&](std::size_t task) {
        const std::size_t i = task / reps;
        const auto queue = config.queue(points[i].discipline, points[i].p);
        if (!queue.is_stable()) return;
        try {
            reps_out[task] = simulate_replication(model, queue, opts[i], task % reps);
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    });

    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        if (!config.queue(points[i].discipline, points[i].p).is_stable()) {
            row.status = "unstable";
            continue;
        }
        std::vector<AopEstimate> done;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& err = errors[i * reps + r];
            if (!err.empty()) {
                row.status = "error: " + err;
                row.fatal = true;
                break;
            }
            done.push_back(*reps_out[i * reps + r]);
        }
        if (row.fatal) continue;
        row.sim = pool_estimates(done);
        const auto dof = row.sim->batches.size() - 1;
        row.sim_se = dof > 0 ? row.sim->ci95_halfwidth / student_t_975(dof) : 0.0;
    }
    return rows;
}

std::vector<ResultRow> cmd_sweep(const ExperimentConfig& config, bool with_simulation)
{
    return with_simulation ? cmd_simulate(config) : cmd_analytic(config);
}

std::vector<OptimizeRow> cmd_optimize(const ExperimentConfig& config)
{
    config.validate();
    const auto model = config.model();
    std::vector<OptimizeRow> rows;
    for (auto d : config.disciplines) {
        OptimizeRow row;
        row.discipline = d;
        try {
            auto opt = config.optimize;
            opt.md1_tol = config.md1_tol;
            row.result = optimal_p(model, config.queue(d, 1.0), opt);
        } catch (const StabilityError&) {
            row.status = "unstable";
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
            row.fatal = true;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

bool any_fatal(std::span<const ResultRow> rows) noexcept
{
    return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.fatal; });
}

bool any_fatal(std::span<const OptimizeRow> rows) noexcept
{
    return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.fatal; });
}

void write_csv(std::ostream& os, std::span<const ResultRow> rows)
{
    os << kResultCsvHeader << '\n';
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        os << to_string(r.discipline) << ',' << fmt(r.p, 10) << ',' << fmt(r.rho, 10) << ',' << fmt(r.kappa) << ','
           << (r.analytic ? fmt(r.analytic->aop) : "") << ',' << (r.sim ? fmt(r.sim->mean) : "") << ','
           << (r.sim ? fmt(r.sim->ci95_halfwidth) : "") << ',' << (r.sim ? std::to_string(r.sim->n_cycles) : "")
           << ',' << (r.sim ? fmt(r.horizon) : "") << ',' << r.seed << ',' << status << '\n';
    }
}

void write_json(std::ostream& os, std::span<const ResultRow> rows, const ExperimentConfig& config)
{
    nlohmann::json doc;
    doc["config"] = {{"v", config.v},
                     {"mode", to_string(config.mode)},
                     {"epsilon", config.epsilon},
                     {"lambda", config.lambda},
                     {"mu", config.mu},
                     {"replications", config.sim.replications},
                     {"cycles_per_replication", config.sim.cycles_per_replication},
                     {"seed", config.sim.seed}};
    auto& out = doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"discipline", to_string(r.discipline)},
                         {"p", r.p},
                         {"rho", r.rho},
                         {"kappa", r.kappa},
                         {"seed", r.seed},
                         {"status", r.status}};
        if (r.analytic) {
            j["aop_analytic"] = r.analytic->aop;
            j["e_g1"] = r.analytic->e_g1;
            j["e_g2"] = r.analytic->e_g2;
            j["e_g3"] = r.analytic->e_g3;
            j["e_q"] = r.analytic->e_q;
        }
        if (r.sim) {
            j["aop_sim_mean"] = r.sim->mean;
            j["aop_sim_ci95"] = r.sim->ci95_halfwidth;
            j["n_cycles"] = r.sim->n_cycles;
            j["horizon"] = r.horizon;
            j["z"] = optional_number(r.z_score());
        }
        out.push_back(std::move(j));
    }
    os << doc.dump(2) << '\n';
}

void write_optimize_csv(std::ostream& os, std::span<const OptimizeRow> rows)
{
    os << "discipline,p_star,aop_star,at_boundary,status\n";
    for (const auto& r : rows) {
        os << to_string(r.discipline) << ',' << (r.result ? fmt(r.result->p, 10) : "") << ','
           << (r.result ? fmt(r.result->aop) : "") << ',' << (r.result ? (r.result->at_boundary ? "1" : "0") : "")
           << ',' << r.status << '\n';
    }
}

void write_optimize_json(std::ostream& os, std::span<const OptimizeRow> rows)
{
    auto doc = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"discipline", to_string(r.discipline)}, {"status", r.status}};
        if (r.result) {
            j["p_star"] = r.result->p;
            j["aop_star"] = r.result->aop;
            j["at_boundary"] = r.result->at_boundary;
            auto& grid = j["grid"] = nlohmann::json::array();
            for (const auto& [p, a] : r.result->grid) grid.push_back({p, a});
        }
        doc.push_back(std::move(j));
    }
    os << doc.dump(2) << '\n';
}

void write_plot_spec(std::ostream& os, const std::string& csv_path, const ExperimentConfig& config)
{
    std::ostringstream title;
    title << "AoP vs polling probability (v=" << fmt(config.v, 6) << " m/s, lambda=" << fmt(config.lambda, 6)
          << ", mu=" << fmt(config.mu, 6) << ", " << to_string(config.mode) << ")";
    nlohmann::json spec{
        {"data", csv_path},
        {"title", title.str()},
        {"x", {{"field", "p"}, {"label", "polling probability p"}}},
        {"y", {{"label", "AoP (m^2)"}}},
        {"group_by", "discipline"},
        {"series",
         {{{"field", "aop_analytic"}, {"mark", "line"}},
          {{"field", "aop_sim_mean"}, {"mark", "point"}, {"error", "aop_sim_ci95"}}}},
        {"filter", {{"field", "status"}, {"equals", "ok"}}},
    };
    os << spec.dump(2) << '\n';
}

} // namespace aop
