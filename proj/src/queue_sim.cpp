#include "aop/queue_sim.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "aop/rng.hpp"

namespace aop {

std::vector<UpdateRecord> simulate_queue(std::span<const double> polled_epochs, const QueueParams& queue,
                                         std::uint64_t seed)
{
    for (std::size_t i = 1; i < polled_epochs.size(); ++i)
        if (!(polled_epochs[i] > polled_epochs[i - 1]))
            throw std::invalid_argument("polled epochs must be strictly increasing");

    Rng rng(seed);
    const bool markov = markovian_service(queue.discipline());
    const double ds = queue.service_period();

    std::vector<UpdateRecord> out;
    out.reserve(polled_epochs.size());
    double last_depart = 0.0;
    for (double gen : polled_epochs) {
        UpdateRecord rec;
        rec.gen_time = gen;
        rec.service_start = std::max(gen, last_depart);
        const double s = markov ? rng.exponential(queue.mu()) : ds;
        rec.depart_time = rec.service_start + s;
        last_depart = rec.depart_time;
        out.push_back(rec);
    }
    return out;
}

std::vector<double> empirical_waiting_cdf(std::span<const UpdateRecord> records, std::span<const double> grid)
{
    if (records.empty()) throw std::invalid_argument("empirical_waiting_cdf: no records");
    std::vector<double> waits;
    waits.reserve(records.size());
    for (const auto& r : records) waits.push_back(r.waiting());
    std::sort(waits.begin(), waits.end());

    std::vector<double> cdf;
    cdf.reserve(grid.size());
    const double n = static_cast<double>(waits.size());
    for (double w : grid) {
        const auto count = std::upper_bound(waits.begin(), waits.end(), w) - waits.begin();
        cdf.push_back(static_cast<double>(count) / n);
    }
    return cdf;
}

double busy_fraction(std::span<const UpdateRecord> records, double t0, double t1)
{
    if (!(t1 > t0)) throw std::invalid_argument("busy_fraction: empty interval");
    double busy = 0.0;
    for (const auto& r : records) {
        const double a = std::max(r.service_start, t0);
        const double b = std::min(r.depart_time, t1);
        if (b > a) busy += b - a;
    }
    return busy / (t1 - t0);
}

void write_updates_csv(std::ostream& os, std::span<const UpdateRecord> records)
{
    const auto old_precision = os.precision(17);
    os << "gen_time,service_start,depart_time\n";
    for (const auto& r : records) os << r.gen_time << ',' << r.service_start << ',' << r.depart_time << '\n';
    os.precision(old_precision);
}

} // namespace aop
