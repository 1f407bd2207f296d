#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "aop/core_model.hpp"

namespace aop {

/// Timing of one polled update through the FCFS server.
struct UpdateRecord {
    double gen_time = 0.0;
    double service_start = 0.0;
    double depart_time = 0.0;

    double waiting() const noexcept { return service_start - gen_time; }
    double service() const noexcept { return depart_time - service_start; }
    double system_time() const noexcept { return depart_time - gen_time; }
};

/// Single-server FCFS queue with an infinite buffer fed by the polled epochs.
/// Service times are Exponential(mu) for Markovian service and D_s = 1/mu
/// otherwise; start_i = max(gen_i, depart_{i-1}).
/// Throws std::invalid_argument unless the epochs are strictly increasing.
std::vector<UpdateRecord> simulate_queue(std::span<const double> polled_epochs, const QueueParams& queue,
                                         std::uint64_t seed);

/// Empirical CDF of the waiting times evaluated at each grid point.
std::vector<double> empirical_waiting_cdf(std::span<const UpdateRecord> records, std::span<const double> grid);

/// Fraction of [t0, t1] during which the server is busy.
double busy_fraction(std::span<const UpdateRecord> records, double t0, double t1);

/// Writes `gen_time,service_start,depart_time`.
void write_updates_csv(std::ostream& os, std::span<const UpdateRecord> records);

} // namespace aop
