#include "aop/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "aop/rng.hpp"

namespace aop {

std::vector<HopRecord> generate_hops(const QueueParams& queue, const ModelParams& model,
                                     double horizon, std::uint64_t seed)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("horizon must be positive and finite");

    Rng rng(seed);
    const bool markov = markovian_arrivals(queue.discipline());
    const double period = queue.arrival_period();
    const double eps = model.mode() == Mode::DR ? model.epsilon() : 0.0;

    // ceil with slack so that horizon = n * D_a yields exactly n hops
    const std::size_t fixed_count =
        markov ? 0
               : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon * queue.lambda() - 1e-9)));

    std::vector<HopRecord> hops;
    hops.reserve(markov ? static_cast<std::size_t>(horizon * queue.lambda() * 1.05) + 16 : fixed_count);

    double t = 0.0;
    while (markov ? t < horizon : hops.size() < fixed_count) {
        HopRecord hop;
        const double u_dur = rng.uniform_open();
        hop.duration = markov ? -std::log(u_dur) / queue.lambda() : period;
        hop.theta = 2.0 * std::numbers::pi * (1.0 - rng.uniform());
        hop.delta_err = eps * (2.0 * rng.uniform() - 1.0);
        hop.polled = rng.uniform() < queue.p();
        t += hop.duration;
        hops.push_back(hop);
    }
    return hops;
}

std::vector<double> hop_start_times(std::span<const HopRecord> hops)
{
    std::vector<double> starts(hops.size() + 1);
    double t = 0.0;
    for (std::size_t j = 0; j < hops.size(); ++j) {
        starts[j] = t;
        t += hops[j].duration;
    }
    starts[hops.size()] = t;
    return starts;
}

std::vector<double> polled_epochs(std::span<const HopRecord> hops)
{
    const auto starts = hop_start_times(hops);
    std::vector<double> epochs;
    for (std::size_t j = 1; j < hops.size(); ++j)
        if (hops[j].polled) epochs.push_back(starts[j]);
    return epochs;
}

Point advance_position(Point start, const HopRecord& hop, double v) noexcept
{
    const double step = v * hop.duration;
    return {start.x + step * std::cos(hop.theta), start.y + step * std::sin(hop.theta)};
}

Point dr_estimate(Point start_est, std::span<const HopRecord> hops, double v) noexcept
{
    Point est = start_est;
    for (const auto& hop : hops) {
        const double step = v * hop.duration;
        const double heading = hop.theta + hop.delta_err;
        est.x += step * std::cos(heading);
        est.y += step * std::sin(heading);
    }
    return est;
}

Trajectory::Trajectory(Point origin, std::vector<HopRecord> hops, double v)
    : origin_(origin), hops_(std::move(hops)), v_(v)
{
    waypoints_.reserve(hops_.size());
    Point pos = origin_;
    for (const auto& hop : hops_) {
        pos = advance_position(pos, hop, v_);
        waypoints_.push_back(pos);
    }
}

void Trajectory::write_csv(std::ostream& os) const
{
    const auto old_precision = os.precision(17);
    os << "hop_index,t_start,duration,theta,delta_err,polled,x_waypoint,y_waypoint\n";
    double t = 0.0;
    for (std::size_t h = 0; h < hops_.size(); ++h) {
        const auto& hop = hops_[h];
        os << h << ',' << t << ',' << hop.duration << ',' << hop.theta << ',' << hop.delta_err << ','
           << (hop.polled ? 1 : 0) << ',' << waypoints_[h].x << ',' << waypoints_[h].y << '\n';
        t += hop.duration;
    }
    os.precision(old_precision);
}

} // namespace aop
