#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aop/aop_estimator.hpp"
#include "aop/core_model.hpp"
#include "aop/queue_sim.hpp"

namespace aop {

/// Statistics start after max(min_updates updates, drain_multiple / (mu (1 - rho))
/// seconds) unless `seconds` overrides the whole rule.
struct WarmupPolicy {
    std::size_t min_updates = 10'000;
    double drain_multiple = 50.0;
    std::optional<double> seconds;
};

struct SimulationOptions {
    std::size_t replications = 20;
    std::size_t cycles_per_replication = 10'000;
    double horizon = 0.0; // seconds per replication; 0 picks one from the cycle target
    WarmupPolicy warmup;
    std::uint64_t seed = 1;
    std::size_t batches = 30;
    unsigned threads = 0; // 0 = hardware concurrency
};

/// One replication's raw sample path and its post-warm-up whole-cycle window.
struct SamplePath {
    std::vector<HopRecord> hops;
    std::vector<UpdateRecord> updates;
    Window window;
    std::size_t warmup_updates = 0;
};

double warmup_seconds(const QueueParams& queue, const WarmupPolicy& policy);
double auto_horizon(const QueueParams& queue, const SimulationOptions& options);

/// Hop stream seeded from derive_seed(seed, 1), service stream from
/// derive_seed(seed, 2). Throws std::invalid_argument if the horizon leaves
/// fewer than two departures after warm-up.
SamplePath simulate_path(const ModelParams& model, const QueueParams& queue, double horizon,
                         const WarmupPolicy& warmup, std::uint64_t seed);

struct SimulationResult {
    AopEstimate pooled; // TimeIntegral, batches pooled over replications
    std::vector<AopEstimate> replications;
    double horizon = 0.0;
};

/// Seed of replication r under a master seed.
std::uint64_t replication_seed(std::uint64_t master, std::size_t replication) noexcept;

AopEstimate simulate_replication(const ModelParams& model, const QueueParams& queue,
                                 const SimulationOptions& options, std::size_t replication);

/// Combines replications: mean = total area / total time, CI over all batches.
AopEstimate pool_estimates(std::span<const AopEstimate> replications);

/// Requires a stable queue. Output is independent of the thread count.
SimulationResult simulate_aop(const ModelParams& model, const QueueParams& queue, const SimulationOptions& options);

/// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace aop
