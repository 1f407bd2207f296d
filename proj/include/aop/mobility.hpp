#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "aop/core_model.hpp"

namespace aop {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Draws an unbounded RWP hop sequence covering [0, horizon].
///
/// Hop durations are Exponential(lambda) for Markovian arrivals and the
/// constant D_a = 1/lambda otherwise. Every hop consumes four uniforms from
/// one stream in the order (duration, theta, delta, poll), so the queue
/// sample path does not depend on epsilon or on the mode.
std::vector<HopRecord> generate_hops(const QueueParams& queue, const ModelParams& model,
                                     double horizon, std::uint64_t seed);

/// Start time of every hop (the waypoint epochs), plus the end of the last
/// hop as a final element.
std::vector<double> hop_start_times(std::span<const HopRecord> hops);

/// Generation epochs of polled updates. The waypoint at t = 0 is excluded.
std::vector<double> polled_epochs(std::span<const HopRecord> hops);

Point advance_position(Point start, const HopRecord& hop, double v) noexcept;

/// Dead-reckoning extrapolation with the sensed headings theta + delta_err.
Point dr_estimate(Point start_est, std::span<const HopRecord> hops, double v) noexcept;

class Trajectory {
public:
    Trajectory(Point origin, std::vector<HopRecord> hops, double v);

    Point origin() const noexcept { return origin_; }
    double speed() const noexcept { return v_; }
    const std::vector<HopRecord>& hops() const noexcept { return hops_; }

    /// waypoints()[h] is the position at the end of hop h.
    const std::vector<Point>& waypoints() const noexcept { return waypoints_; }

    /// Writes `hop_index,t_start,duration,theta,delta_err,polled,x_waypoint,y_waypoint`.
    void write_csv(std::ostream& os) const;

private:
    Point origin_;
    std::vector<HopRecord> hops_;
    double v_;
    std::vector<Point> waypoints_;
};

} // namespace aop
