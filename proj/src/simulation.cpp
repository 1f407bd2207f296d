#include "aop/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "aop/mobility.hpp"
#include "aop/rng.hpp"

namespace aop {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

double warmup_seconds(const QueueParams& queue, const WarmupPolicy& policy)
{
    if (policy.seconds) return *policy.seconds;
    const double by_count = static_cast<double>(policy.min_updates) / queue.polled_rate();
    const double rho = queue.rho();
    const double by_drain = rho < 1.0 ? policy.drain_multiple / (queue.mu() * (1.0 - rho)) : 0.0;
    return std::max(by_count, by_drain);
}

double auto_horizon(const QueueParams& queue, const SimulationOptions& options)
{
    if (options.horizon > 0.0) return options.horizon;
    const double cycles = static_cast<double>(options.cycles_per_replication) * 1.02 + 10.0;
    return warmup_seconds(queue, options.warmup) + cycles / queue.polled_rate() + 10.0 * queue.arrival_period();
}

SamplePath simulate_path(const ModelParams& model, const QueueParams& queue, double horizon,
                         const WarmupPolicy& warmup, std::uint64_t seed)
{
    SamplePath path;
    path.hops = generate_hops(queue, model, horizon, derive_seed(seed, 1));
    const auto epochs = polled_epochs(path.hops);
    path.updates = simulate_queue(epochs, queue, derive_seed(seed, 2));

    const double t_warm = warmup_seconds(queue, warmup);
    const auto before = static_cast<std::size_t>(
        std::lower_bound(epochs.begin(), epochs.end(), t_warm) - epochs.begin());
    path.warmup_updates = warmup.seconds ? before : std::max(before, warmup.min_updates);

    double coverage = 0.0;
    for (const auto& h : path.hops) coverage += h.duration;
    const auto last = std::upper_bound(path.updates.begin(), path.updates.end(), coverage,
                                       [](double t, const UpdateRecord& u) { return t < u.depart_time; });
    const auto n_usable = static_cast<std::size_t>(last - path.updates.begin());
    if (n_usable < path.warmup_updates + 2)
        throw std::invalid_argument("horizon too short: fewer than two departures after warm-up");
    path.window = Window{path.updates[path.warmup_updates].depart_time, path.updates[n_usable - 1].depart_time};
    return path;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t replication) noexcept
{
    return derive_seed(master, 1000 + replication);
}

AopEstimate simulate_replication(const ModelParams& model, const QueueParams& queue,
                                 const SimulationOptions& options, std::size_t replication)
{
    const auto path = simulate_path(model, queue, auto_horizon(queue, options), options.warmup,
                                    replication_seed(options.seed, replication));
    return integrate_aop(path.hops, path.updates, model, path.window, options.batches);
}

AopEstimate pool_estimates(std::span<const AopEstimate> replications)
{
    AopEstimate out;
    if (replications.empty()) return out;
    out.method = replications.front().method;
    CompensatedSum area, time;
    for (const auto& r : replications) {
        area += r.mean * r.horizon;
        time += r.horizon;
        out.n_cycles += r.n_cycles;
        out.batches.insert(out.batches.end(), r.batches.begin(), r.batches.end());
    }
    out.horizon = time.value();
    out.mean = time.value() > 0.0 ? area.value() / time.value() : 0.0;
    out.ci95_halfwidth = ratio_ci95_halfwidth(out.batches);
    return out;
}

SimulationResult simulate_aop(const ModelParams& model, const QueueParams& queue, const SimulationOptions& options)
{
    queue.require_stable();
    if (options.replications == 0) throw std::invalid_argument("replications must be >= 1");
    SimulationResult result;
    result.horizon = auto_horizon(queue, options);
    result.replications.resize(options.replications);
    parallel_for(options.replications, options.threads, [&](std::size_t r) {
        result.replications[r] = simulate_replication(model, queue, options, r);
    });
    result.pooled = pool_estimates(result.replications);
    return result;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace aop
