#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "aop/core_model.hpp"

using namespace aop;

TEST_SUITE("core_model") {

TEST_CASE("kappa per mode")
{
    CHECK(kappa(ModelParams(5.0, Mode::MA)) == 1.0);
    CHECK(kappa(ModelParams(5.0, Mode::DR, 0.1)) == doctest::Approx(0.01 / 3.0).epsilon(1e-15));
    CHECK(kappa(ModelParams(5.0, Mode::DR, 0.0)) == 0.0);
    // epsilon is irrelevant in MA
    CHECK(kappa(ModelParams(5.0, Mode::MA, 0.7)) == 1.0);
}

TEST_CASE("peb_excess examples")
{
    const std::vector<double> hops{0.1, 0.2};
    CHECK(peb_excess(hops, 0.05, ModelParams(5.0)) == doctest::Approx(1.3125).epsilon(1e-14));
    CHECK(peb_excess({}, 0.0, ModelParams(5.0)) == 0.0);
    CHECK(peb_excess(hops, 0.05, ModelParams(5.0, Mode::DR, 0.1)) == doctest::Approx(0.004375).epsilon(1e-14));
}

TEST_CASE("peb_excess properties")
{
    const ModelParams ma(3.0);
    const ModelParams dr(3.0, Mode::DR, 0.2);
    const std::vector<double> h1{0.3, 0.05, 0.11};
    const std::vector<double> h2{0.07, 0.4};
    std::vector<double> joined = h1;
    joined.insert(joined.end(), h2.begin(), h2.end());

    CHECK(peb_excess(joined, 0.0, ma) == doctest::Approx(peb_excess(h1, 0.0, ma) + peb_excess(h2, 0.0, ma)));
    CHECK(peb_excess(h1, 0.02, dr) == doctest::Approx(0.04 / 3.0 * peb_excess(h1, 0.02, ma)).epsilon(1e-14));

    double prev = -1.0;
    for (double tau = 0.0; tau < 1.0; tau += 0.01) {
        const double x = peb_excess(h1, tau, ma);
        CHECK(x >= prev);
        prev = x;
    }
    auto longer = h1;
    longer[1] += 0.01;
    CHECK(peb_excess(longer, 0.1, ma) > peb_excess(h1, 0.1, ma));
}

TEST_CASE("peb_excess rejects bad input")
{
    CHECK_THROWS_AS(peb_excess(std::vector<double>{-0.1}, 0.0, ModelParams(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(peb_excess({}, -1.0, ModelParams(1.0)), std::invalid_argument);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(ModelParams(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, Mode::DR, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(QueueParams(Discipline::MM1, 0.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(QueueParams(Discipline::MM1, 1.0, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(QueueParams(Discipline::MM1, 1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(QueueParams(Discipline::MM1, 1.0, 1.0, 1.5), std::invalid_argument);
    CHECK_NOTHROW(QueueParams(Discipline::MM1, 1.0, 1.0, 1.0));
}

TEST_CASE("stability per discipline")
{
    CHECK(QueueParams(Discipline::MM1, 20, 20, 0.5).is_stable());
    CHECK_FALSE(QueueParams(Discipline::MM1, 20, 20, 1.0).is_stable());
    CHECK_FALSE(QueueParams(Discipline::MD1, 20, 20, 1.0).is_stable());
    CHECK_FALSE(QueueParams(Discipline::DM1, 20, 20, 1.0).is_stable());
    CHECK(QueueParams(Discipline::DD1, 20, 20, 1.0).is_stable());
    CHECK_FALSE(QueueParams(Discipline::DD1, 25, 20, 0.1).is_stable());
    CHECK_THROWS_AS(QueueParams(Discipline::MM1, 20, 20, 1.0).require_stable(), StabilityError);

    const QueueParams q(Discipline::DM1, 20, 40, 0.5);
    CHECK(q.rho() == doctest::Approx(0.25));
    CHECK(q.arrival_period() == doctest::Approx(0.05));
    CHECK(q.service_period() == doctest::Approx(0.025));
}

TEST_CASE("parsing")
{
    CHECK(parse_discipline("mm1") == Discipline::MM1);
    CHECK(parse_discipline("M/D/1") == Discipline::MD1);
    CHECK(parse_discipline("DD1") == Discipline::DD1);
    CHECK(parse_mode("DR") == Mode::DR);
    CHECK(parse_mode("ma") == Mode::MA);
    CHECK_THROWS_AS(parse_discipline("GG1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mode("xx"), std::invalid_argument);
    CHECK(to_string(Discipline::DM1) == "DM1");
}

TEST_CASE("angles and DR factor")
{
    CHECK(normalize_angle(0.0) == doctest::Approx(2 * std::numbers::pi));
    CHECK(normalize_angle(-std::numbers::pi / 2) == doctest::Approx(1.5 * std::numbers::pi));
    CHECK(normalize_angle(5 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(hop_error_factor(ModelParams(1.0), 0.3) == 1.0);
    const ModelParams dr(1.0, Mode::DR, 0.5);
    for (double d : {0.0, 1e-9, 0.01, 0.3, 0.5})
        CHECK(hop_error_factor(dr, d) == doctest::Approx(2.0 * (1.0 - std::cos(d))).epsilon(1e-12));
}

}
