#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "aop/mobility.hpp"
#include "aop/queue_sim.hpp"

using namespace aop;

namespace {

struct Moments {
    double mean;
    double se;
};

// Batch-means standard error; the queue makes consecutive records correlated.
Moments batch_moments(const std::vector<double>& x, std::size_t batches = 50)
{
    const std::size_t per = x.size() / batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += x[i];
        means.push_back(s / per);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= batches;
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / (batches - 1) / batches)};
}

std::vector<UpdateRecord> long_run(const QueueParams& q, double horizon, std::uint64_t seed)
{
    const auto hops = generate_hops(q, ModelParams(1), horizon, seed);
    auto recs = simulate_queue(polled_epochs(hops), q, seed + 1);
    recs.erase(recs.begin(), recs.begin() + 10000);
    return recs;
}

} // namespace

TEST_SUITE("queue_sim") {

TEST_CASE("D/D/1 with D_s < D_a never waits")
{
    const QueueParams q(Discipline::DD1, 20, 25, 1.0);
    const auto recs = simulate_queue(polled_epochs(generate_hops(q, ModelParams(5), 10.0, 1)), q, 2);
    REQUIRE(!recs.empty());
    for (const auto& r : recs) {
        CHECK(r.waiting() == 0.0);
        CHECK(r.system_time() == doctest::Approx(0.04).epsilon(1e-12));
    }
    const std::vector<double> grid{0.0};
    CHECK(empirical_waiting_cdf(recs, grid)[0] == 1.0);
}

TEST_CASE("single arrival into an empty system")
{
    const std::vector<double> epochs{0.0};
    const auto recs = simulate_queue(epochs, QueueParams(Discipline::MD1, 20, 20, 0.5), 1);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].depart_time == doctest::Approx(0.05));
    CHECK(recs[0].waiting() == 0.0);
}

TEST_CASE("rejects non-increasing epochs")
{
    const QueueParams q(Discipline::MM1, 20, 20, 0.5);
    const std::vector<double> equal{0.1, 0.1};
    const std::vector<double> down{0.2, 0.1};
    CHECK_THROWS_AS(simulate_queue(equal, q, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_queue(down, q, 1), std::invalid_argument);
    CHECK_THROWS_AS(empirical_waiting_cdf({}, equal), std::invalid_argument);
}

TEST_CASE("Lindley consistency, FCFS order and work conservation")
{
    const QueueParams q(Discipline::MM1, 20, 20, 0.8);
    const auto recs = simulate_queue(polled_epochs(generate_hops(q, ModelParams(1), 500.0, 3)), q, 4);
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const double expected_wait = std::max(0.0, recs[i - 1].depart_time - recs[i].gen_time);
        CHECK(recs[i].waiting() == doctest::Approx(expected_wait).epsilon(1e-12));
        CHECK(recs[i].depart_time >= recs[i - 1].depart_time);
        CHECK(recs[i].gen_time <= recs[i].service_start);
        // idle server only if the queue is empty
        if (recs[i].service_start > recs[i].gen_time) CHECK(recs[i].service_start == recs[i - 1].depart_time);
    }
}

TEST_CASE("M/M/1 mean system time")
{
    const QueueParams q(Discipline::MM1, 20, 20, 0.5);
    const auto recs = long_run(q, 40000.0, 5);
    std::vector<double> t;
    for (const auto& r : recs) t.push_back(r.system_time());
    const auto m = batch_moments(t);
    CHECK(std::abs(m.mean - 0.1) < 3 * m.se);
}

TEST_CASE("busy fraction tends to rho")
{
    const QueueParams q(Discipline::MD1, 20, 20, 0.6);
    const auto hops = generate_hops(q, ModelParams(1), 40000.0, 6);
    const auto recs = simulate_queue(polled_epochs(hops), q, 7);
    std::vector<double> fractions;
    for (int b = 0; b < 40; ++b) fractions.push_back(busy_fraction(recs, 1000.0 + b * 950.0, 1000.0 + (b + 1) * 950.0));
    const auto m = batch_moments(fractions, 40);
    CHECK(std::abs(m.mean - 0.6) < 3 * m.se);
}

TEST_CASE("M/D/1 empirical waiting CDF at 0 and D_s")
{
    const QueueParams q(Discipline::MD1, 20, 20, 0.5);
    const auto recs = long_run(q, 40000.0, 8);
    std::vector<double> at0, atd;
    for (const auto& r : recs) {
        at0.push_back(r.waiting() <= 0.0 ? 1.0 : 0.0);
        atd.push_back(r.waiting() <= 0.05 ? 1.0 : 0.0);
    }
    const auto m0 = batch_moments(at0);
    const auto md = batch_moments(atd);
    CHECK(std::abs(m0.mean - 0.5) < 3 * m0.se);
    CHECK(std::abs(md.mean - 0.5 * std::exp(0.5)) < 3 * md.se);

    const std::vector<double> grid{0.0, 0.01, 0.05, 0.1, 1.0};
    const auto cdf = empirical_waiting_cdf(recs, grid);
    for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i] >= cdf[i - 1]);
    CHECK(cdf.back() <= 1.0);
}

TEST_CASE("update export")
{
    const std::vector<double> epochs{0.1, 0.2};
    const auto recs = simulate_queue(epochs, QueueParams(Discipline::DD1, 10, 20, 1.0), 1);
    std::ostringstream os;
    write_updates_csv(os, recs);
    CHECK(os.str().rfind("gen_time,service_start,depart_time\n", 0) == 0);
}

}
