#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "aop/analytic.hpp"
#include "aop/simulation.hpp"

using namespace aop;

TEST_SUITE("simulation") {

TEST_CASE("warm-up rule")
{
    const QueueParams q(Discipline::MM1, 20, 20, 0.5);
    WarmupPolicy w;
    CHECK(warmup_seconds(q, w) == doctest::Approx(10000 / 10.0));
    w.min_updates = 10;
    CHECK(warmup_seconds(q, w) == doctest::Approx(50 / (20 * 0.5)));
    w.seconds = 3.0;
    CHECK(warmup_seconds(q, w) == 3.0);
    // rho = 1 D/D/1 has no drain term
    CHECK(warmup_seconds(QueueParams(Discipline::DD1, 20, 20, 1.0), WarmupPolicy{}) == doctest::Approx(500.0));
}

TEST_CASE("sample path window sits after warm-up on whole cycles")
{
    const QueueParams q(Discipline::MD1, 20, 20, 0.5);
    WarmupPolicy w;
    w.min_updates = 100;
    const auto path = simulate_path(ModelParams(5), q, 200.0, w, 9);
    CHECK(path.warmup_updates >= 100);
    CHECK(path.window.t0 == path.updates[path.warmup_updates].depart_time);
    bool is_departure = false;
    for (const auto& u : path.updates) is_departure = is_departure || u.depart_time == path.window.t1;
    CHECK(is_departure);
    CHECK_THROWS_AS(simulate_path(ModelParams(5), q, 5.0, w, 9), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count")
{
    SimulationOptions o;
    o.replications = 6;
    o.cycles_per_replication = 2000;
    o.seed = 77;
    const ModelParams m(5);
    const QueueParams q(Discipline::MM1, 20, 20, 0.5);
    o.threads = 1;
    const auto a = simulate_aop(m, q, o);
    o.threads = 4;
    const auto b = simulate_aop(m, q, o);
    CHECK(a.pooled.mean == b.pooled.mean);
    CHECK(a.pooled.ci95_halfwidth == b.pooled.ci95_halfwidth);
    CHECK(a.pooled.n_cycles == b.pooled.n_cycles);
    o.seed = 78;
    CHECK(simulate_aop(m, q, o).pooled.mean != a.pooled.mean);
}

TEST_CASE("pooled estimate reaches the cycle target")
{
    SimulationOptions o;
    o.replications = 4;
    o.cycles_per_replication = 3000;
    const auto r = simulate_aop(ModelParams(5), QueueParams(Discipline::DM1, 20, 20, 0.4), o);
    CHECK(r.pooled.n_cycles >= 4 * 3000);
    CHECK(r.pooled.batches.size() == 4 * o.batches);
    CHECK(r.pooled.ci95_halfwidth > 0.0);
}

TEST_CASE("unstable queues are refused")
{
    CHECK_THROWS_AS(simulate_aop(ModelParams(5), QueueParams(Discipline::MM1, 20, 20, 1.0), SimulationOptions{}),
                    StabilityError);
}

TEST_CASE("agreement with the closed form at moderate load")
{
    SimulationOptions o;
    o.replications = 10;
    o.cycles_per_replication = 20000;
    o.seed = 3;
    for (auto d : {Discipline::MM1, Discipline::DM1, Discipline::MD1, Discipline::DD1}) {
        const QueueParams q(d, 20, 20, 0.4);
        const auto sim = simulate_aop(ModelParams(5), q, o);
        const double exact = aop_analytic(ModelParams(5), q).aop;
        CHECK(std::abs(sim.pooled.mean - exact) <= 1.5 * sim.pooled.ci95_halfwidth);
    }
}

TEST_CASE("parallel_for propagates exceptions")
{
    CHECK_THROWS_AS(parallel_for(8, 3,
                                 [](std::size_t i) {
                                     if (i == 5) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

}
