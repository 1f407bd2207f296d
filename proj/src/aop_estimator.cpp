#include "aop/aop_estimator.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "aop/mobility.hpp"

namespace aop {

namespace {

// Index of the hop starting exactly at `gen`.
std::size_t hop_of_epoch(const std::vector<double>& starts, double gen)
{
    const auto it = std::lower_bound(starts.begin(), starts.end() - 1, gen);
    if (it == starts.end() - 1 || *it != gen)
        throw std::invalid_argument("update generation time does not coincide with a waypoint epoch");
    return static_cast<std::size_t>(it - starts.begin());
}

// Hop containing time t: starts[h] <= t < starts[h+1]; the final instant maps
// onto the last hop.
std::size_t hop_containing(const std::vector<double>& starts, double t)
{
    const std::size_t n = starts.size() - 1;
    const auto it = std::upper_bound(starts.begin(), starts.end(), t);
    auto h = static_cast<std::size_t>(it - starts.begin());
    h = h == 0 ? 0 : h - 1;
    return std::min(h, n - 1);
}

// Geometric area under the excess referenced at hop `first` over
// [starts[first], t_end].
double excess_area(std::span<const HopRecord> hops, const std::vector<double>& starts, std::size_t first,
                   double t_end, double v2)
{
    const std::size_t last = hop_containing(starts, t_end);
    CompensatedSum area;
    double acc = 0.0;
    for (std::size_t m = first; m < last; ++m) {
        const double y = hops[m].duration;
        area += acc * y + v2 * y * y * y / 3.0;
        acc += v2 * y * y;
    }
    const double tau = t_end - starts[std::max(first, last)];
    if (tau > 0.0) area += acc * tau + v2 * tau * tau * tau / 3.0;
    return area.value();
}

} // namespace

std::string_view to_string(EstimateMethod method) noexcept
{
    return method == EstimateMethod::CycleAreas ? "CycleAreas" : "TimeIntegral";
}

AopEstimate integrate_aop(std::span<const HopRecord> hops, std::span<const UpdateRecord> updates,
                          const ModelParams& model, Window window, std::size_t n_batches)
{
    if (hops.empty()) throw std::invalid_argument("integrate_aop: no hops");
    const auto starts = hop_start_times(hops);
    const std::size_t n = hops.size();
    if (!(window.t1 > window.t0) || window.t0 < 0.0 || window.t1 > starts[n])
        throw std::invalid_argument("integrate_aop: window outside the simulated horizon");
    n_batches = std::max<std::size_t>(n_batches, 1);

    // Freshest update available at t0.
    const auto first_after = std::upper_bound(updates.begin(), updates.end(), window.t0,
                                              [](double t, const UpdateRecord& u) { return t < u.depart_time; });
    if (first_after == updates.begin())
        throw std::invalid_argument("integrate_aop: no departure at or before the window start");
    std::size_t next_dep = static_cast<std::size_t>(first_after - updates.begin());
    std::size_t ref_hop = hop_of_epoch(starts, updates[next_dep - 1].gen_time);

    const double v2 = model.v() * model.v();
    std::vector<long double> prefix(n + 1, 0.0L);
    std::vector<double> factor(n);
    for (std::size_t j = 0; j < n; ++j) {
        factor[j] = hop_error_factor(model, hops[j].delta_err);
        const long double y = hops[j].duration;
        prefix[j + 1] = prefix[j] + static_cast<long double>(factor[j]) * v2 * y * y;
    }

    const double batch_len = window.length() / static_cast<double>(n_batches);
    auto batch_end = [&](std::size_t b) {
        return b + 1 == n_batches ? window.t1 : window.t0 + static_cast<double>(b + 1) * batch_len;
    };

    AopEstimate est;
    est.method = EstimateMethod::TimeIntegral;
    est.horizon = window.length();
    est.batches.assign(n_batches, RatioBatch{});

    CompensatedSum total;
    CompensatedSum batch_area;
    std::size_t batch = 0;
    double batch_start = window.t0;
    double cur = window.t0;
    std::size_t j = hop_containing(starts, cur);

    while (cur < window.t1) {
        double next = std::min({starts[j + 1], window.t1, batch_end(batch)});
        if (next_dep < updates.size()) next = std::min(next, updates[next_dep].depart_time);

        if (next > cur) {
            const double base = static_cast<double>(prefix[j] - prefix[ref_hop]);
            const double a = cur - starts[j];
            const double b = next - starts[j];
            const double piece = base * (next - cur) + factor[j] * v2 * (b * b * b - a * a * a) / 3.0;
            total += piece;
            batch_area += piece;
        }
        cur = next;

        while (next_dep < updates.size() && updates[next_dep].depart_time <= cur) {
            ref_hop = hop_of_epoch(starts, updates[next_dep].gen_time);
            ++next_dep;
            ++est.n_cycles;
        }
        while (j + 1 < n && cur >= starts[j + 1]) ++j;
        if (batch < n_batches && cur >= batch_end(batch)) {
            est.batches[batch] = RatioBatch{batch_area.value(), cur - batch_start};
            batch_area = CompensatedSum{};
            batch_start = cur;
            ++batch;
        }
    }

    est.mean = total.value() / window.length();
    est.ci95_halfwidth = ratio_ci95_halfwidth(est.batches);
    return est;
}

CycleDecomposition cycle_decompose(std::span<const HopRecord> hops, std::span<const UpdateRecord> updates,
                                   const ModelParams& model, Window window)
{
    if (hops.empty()) throw std::invalid_argument("cycle_decompose: no hops");
    const auto starts = hop_start_times(hops);
    const std::size_t n = hops.size();

    const auto lo = std::lower_bound(updates.begin(), updates.end(), window.t0,
                                     [](const UpdateRecord& u, double t) { return u.depart_time < t; });
    const double t_hi = std::min(window.t1, starts[n]);
    const auto hi = std::upper_bound(updates.begin(), updates.end(), t_hi,
                                     [](double t, const UpdateRecord& u) { return t < u.depart_time; });
    if (hi - lo < 2) throw std::invalid_argument("cycle_decompose: fewer than two departures in window");
    const auto first = static_cast<std::size_t>(lo - updates.begin());
    const auto last = static_cast<std::size_t>(hi - updates.begin()) - 1;

    const double v2 = model.v() * model.v();
    CycleDecomposition out;
    out.window = Window{updates[first].depart_time, updates[last].depart_time};
    out.cycles.reserve(last - first);

    std::size_t prev_hop = hop_of_epoch(starts, updates[first].gen_time);
    for (std::size_t i = first + 1; i <= last; ++i) {
        const std::size_t cur_hop = hop_of_epoch(starts, updates[i].gen_time);
        CycleStats c;
        c.k = cur_hop - prev_hop;
        c.hop_durations.reserve(c.k);
        CompensatedSum x, g1, g2;
        double acc = 0.0;
        for (std::size_t m = prev_hop; m < cur_hop; ++m) {
            const double y = hops[m].duration;
            c.hop_durations.push_back(y);
            x += y;
            g1 += v2 * y * y * y / 3.0;
            g2 += y * acc;
            acc += v2 * y * y;
        }
        c.X = x.value();
        c.T = updates[i].system_time();
        c.H = acc;
        c.G1 = g1.value();
        c.G2 = g2.value();
        c.G3 = c.H * c.T;
        c.Q = c.G1 + c.G2 + c.G3;
        out.cycles.push_back(std::move(c));
        prev_hop = cur_hop;
    }

    out.head_area = excess_area(hops, starts, hop_of_epoch(starts, updates[first].gen_time),
                                updates[first].depart_time, v2);
    out.tail_area = excess_area(hops, starts, hop_of_epoch(starts, updates[last].gen_time),
                                updates[last].depart_time, v2);
    return out;
}

AopEstimate aop_from_cycles(std::span<const CycleStats> cycles, double window_length, const ModelParams& model,
                            const QueueParams& queue, double edge_correction, std::size_t n_batches)
{
    if (cycles.empty()) throw std::invalid_argument("aop_from_cycles: no cycles");
    if (!(window_length > 0.0)) throw std::invalid_argument("aop_from_cycles: window length must be positive");

    const double kap = kappa(model);
    CompensatedSum sum_q;
    for (const auto& c : cycles) sum_q += c.Q;

    AopEstimate est;
    est.method = EstimateMethod::CycleAreas;
    est.n_cycles = cycles.size();
    est.horizon = window_length;
    est.mean = kap * (sum_q.value() + edge_correction) / window_length;
    est.renewal_mean = queue.p() * kap * queue.lambda() * sum_q.value() / static_cast<double>(cycles.size());

    const std::size_t nb = std::clamp<std::size_t>(n_batches, 1, cycles.size());
    est.batches.reserve(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * cycles.size() / nb;
        const std::size_t hi = (b + 1) * cycles.size() / nb;
        CompensatedSum area, len;
        for (std::size_t i = lo; i < hi; ++i) {
            area += kap * cycles[i].Q;
            len += cycles[i].X;
        }
        est.batches.push_back(RatioBatch{area.value(), len.value()});
    }
    est.ci95_halfwidth = ratio_ci95_halfwidth(est.batches);
    return est;
}

AopEstimate aop_from_cycles(const CycleDecomposition& decomposition, const ModelParams& model,
                            const QueueParams& queue, std::size_t n_batches)
{
    return aop_from_cycles(decomposition.cycles, decomposition.window.length(), model, queue,
                           decomposition.edge_correction(), n_batches);
}

void write_cycles_csv(std::ostream& os, std::span<const CycleStats> cycles)
{
    const auto old_precision = os.precision(17);
    os << "cycle_index,k,X_i,T_i,H_i,G1,G2,G3,Q_i\n";
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const auto& c = cycles[i];
        os << i << ',' << c.k << ',' << c.X << ',' << c.T << ',' << c.H << ',' << c.G1 << ',' << c.G2 << ','
           << c.G3 << ',' << c.Q << '\n';
    }
    os.precision(old_precision);
}

} // namespace aop
