#include <cmath>

#include "doctest.h"
#include "hsmdp/bitmask.hpp"
#include "hsmdp/config.hpp"
#include "hsmdp/distribution.hpp"
#include "hsmdp/errors.hpp"
#include "hsmdp/rewards.hpp"
#include "support.hpp"

using namespace hsmdp;

namespace {
Config with_b(int b, double c_pf = 1.39) {
    Config c;
    c.n_durations = b;
    c.c_pf = c_pf;
    return c;
}
} // namespace

TEST_CASE("ztpoisson pmf") {
    CHECK(ztpoisson_pmf(1, std::log(2.0)) == doctest::Approx(0.6931471805599454).epsilon(1e-12));
    CHECK_THROWS_AS(ztpoisson_pmf(0, 1.0), DomainError);
    CHECK_THROWS_AS(ztpoisson_pmf(1, 0.0), DomainError);
    CHECK_THROWS_AS(ztpoisson_pmf(1, -2.0), DomainError);

    double s = 0.0;
    for (Minutes tau = 1; tau <= 200; ++tau) s += ztpoisson_pmf(tau, 5.0);
    CHECK(std::abs(s - 1.0) < 1e-9);
}

TEST_CASE("pmf normalization across rates") {
    for (double k : {0.5, 1.39, 5.0, 20.0}) {
        double s = 0.0;
        for (Minutes tau = 1; tau <= 400; ++tau) s += ztpoisson_pmf(tau, k);
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

TEST_CASE("pmf agrees with a direct factorial evaluation") {
    for (double k : {0.3, 1.39, 7.5, 13.9}) {
        for (int tau = 1; tau <= 40; ++tau)
            CHECK(ztpoisson_pmf(tau, k) == doctest::Approx(testing::ztp_pmf_direct(tau, k)).epsilon(1e-10));
    }
}

TEST_CASE("cdf and quantile are consistent") {
    for (double k : {0.5, 1.39, 13.9, 83.4}) {
        double acc = 0.0;
        for (Minutes tau = 1; tau <= 60; ++tau) {
            acc += ztpoisson_pmf(tau, k);
            CHECK(ztpoisson_cdf(tau, k) == doctest::Approx(acc).epsilon(1e-9));
        }
        for (double u : {0.05, 0.25, 0.5, 0.75, 0.95}) {
            const Minutes q = ztpoisson_quantile(u, k);
            CHECK(ztpoisson_cdf(q, k) >= u);
            if (q > 1) CHECK(ztpoisson_cdf(q - 1, k) < u);
        }
    }
}

TEST_CASE("single-point durations match displayed estimates") {
    const Config c = with_b(1);
    const std::pair<int, Minutes> cases[] = {{30, 42}, {60, 84}, {120, 167}, {180, 251}};
    for (auto [k, expect] : cases) {
        const auto d = discretize_durations(k, c);
        REQUIRE(d.support.size() == 1);
        CHECK(d.support[0].tau == expect);
        CHECK(d.support[0].p == 1.0);
        CHECK(display_minutes(k, c) == expect);
    }
    // c_pf * k landing on an integer must not be pushed up by rounding noise
    CHECK(discretize_durations(100, with_b(1, 1.1)).support[0].tau == 110);
    CHECK(discretize_durations(7, with_b(1, 1.0)).support[0].tau == 7);
    CHECK_THROWS_AS(discretize_durations(0, c), DomainError);
}

TEST_CASE("two-point and three-point supports") {
    SUBCASE("k=10, b=2") {
        const auto d = discretize_durations(10, with_b(2));
        REQUIRE(d.support.size() == 2);
        CHECK(d.support[0].tau == 11);
        CHECK(d.support[1].tau == 16);
        CHECK(d.support[0].p == doctest::Approx(0.5025269933650789).epsilon(1e-10));
        CHECK(d.support[1].p == doctest::Approx(0.4974730066349211).epsilon(1e-10));
        CHECK(std::abs(d.total_probability() - 1.0) < 1e-12);
    }
    SUBCASE("k=15, b=2") {
        const auto d = discretize_durations(15, with_b(2));
        REQUIRE(d.support.size() == 2);
        CHECK(d.support[0].tau == 18);
        CHECK(d.support[1].tau == 24);
        CHECK(d.support[0].p == doctest::Approx(0.541196521172103).epsilon(1e-10));
    }
    SUBCASE("k=10, b=3") {
        const auto d = discretize_durations(10, with_b(3));
        REQUIRE(d.support.size() == 3);
        CHECK(d.support[0].tau == 10);
        CHECK(d.support[1].tau == 14);
        CHECK(d.support[2].tau == 17);
        CHECK(d.support[0].p == doctest::Approx(0.279588535636326).epsilon(1e-10));
        CHECK(d.support[1].p == doctest::Approx(0.43444343741552527).epsilon(1e-10));
        CHECK(d.support[2].p == doctest::Approx(0.2859680269481487).epsilon(1e-10));
    }
    SUBCASE("duplicate quantiles collapse") {
        Config c = with_b(3, 0.5);
        const auto d = discretize_durations(1, c);
        REQUIRE(d.support.size() == 2);
        CHECK(d.support[0].tau == 1);
        CHECK(d.support[1].tau == 2);
        CHECK(d.support[0].p == doctest::Approx(0.8).epsilon(1e-10));
    }
    SUBCASE("k=1, b=2") {
        const auto d = discretize_durations(1, with_b(2));
        REQUIRE(d.support.size() == 2);
        CHECK(d.support[0].p == doctest::Approx(0.58997).epsilon(1e-4));
    }
}

TEST_CASE("property: supports are normalized, sorted and near the mean") {
    testing::Gen gen(11);
    for (int n = 0; n < 300; ++n) {
        const int k = gen.integer(1, 400);
        const int b = gen.integer(1, 6);
        const double cpf = gen.real(0.5, 2.0);
        const auto d = discretize_durations(k, with_b(b, cpf));
        CHECK(d.support.size() >= 1);
        CHECK(d.support.size() <= static_cast<std::size_t>(b));
        CHECK(std::abs(d.total_probability() - 1.0) < 1e-9);
        for (std::size_t i = 0; i < d.support.size(); ++i) {
            CHECK(d.support[i].tau >= 1);
            CHECK(d.support[i].p > 0.0);
            if (i > 0) CHECK(d.support[i].tau > d.support[i - 1].tau);
        }
        if (b >= 3) {
            const double kt = cpf * k;
            CHECK(std::abs(d.expectation() - kt / (1.0 - std::exp(-kt))) <= 1.0);
        }
    }
}

TEST_CASE("penalty factor") {
    CHECK(penalty_factor(0.0) == 1.0);
    CHECK(penalty_factor(1.0) == 0.5);
    CHECK_THROWS_AS(penalty_factor(-0.1), DomainError);
    double prev = 1.0;
    for (double b = 0.05; b < 50; b *= 1.7) {
        const double f = penalty_factor(b);
        CHECK(f < prev);
        CHECK(f > 0.0);
        prev = f;
    }
    CHECK(lateness_penalty(100, 50, 0.0) == 0.0);
    CHECK(lateness_penalty(100, 50, 0.1) == doctest::Approx(5.0));
    CHECK(lateness_penalty(40, 50, 0.1) == 0.0);
}

TEST_CASE("discounted cost") {
    CHECK(discounted_cost(1, 0.9, 3.0) == doctest::Approx(-3.0));
    CHECK(discounted_cost(2, 0.5, 1.0) == doctest::Approx(-1.5));
    CHECK(discounted_cost(3, 1.0, 2.0) == doctest::Approx(-6.0));
    CHECK(discounted_cost(3, 1.0 - 1e-12, 2.0) == doctest::Approx(-6.0).epsilon(1e-9));
    CHECK_THROWS_AS(discounted_cost(0, 0.9, 1.0), DomainError);
    for (double g : {0.5, 0.9, 0.999, 0.999999}) {
        for (Minutes tau = 1; tau <= 100; ++tau) {
            CHECK(discounted_cost(tau, g, 0.7) ==
                  doctest::Approx(testing::geometric_cost(tau, g, 0.7)).epsilon(1e-9));
        }
    }
}

TEST_CASE("slack value") {
    Config c;
    c.slack_reward = 0.0;
    c.gamma = 0.9;
    CHECK(slack_value(c) == 0.0);
    c.slack_reward = 0.01;
    c.gamma = 0.5;
    CHECK(slack_value(c) == doctest::Approx(0.02));
    c.slack_reward = 1e-4;
    c.gamma = 0.999999;
    CHECK(slack_value(c) == doctest::Approx(100.0).epsilon(1e-6));
    c.gamma = 1.0;
    CHECK_THROWS_AS(slack_value(c), ConfigError);
}

TEST_CASE("config validation") {
    Config c;
    CHECK_NOTHROW(c.validate());
    c.gamma = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.slack_reward = 0.0;
    CHECK_NOTHROW(c.validate());
    c.gamma = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = Config{};
    c.c_pf = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = Config{};
    c.n_durations = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = Config{};
    c.loss_rate = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = Config{};
    c.penalty_rate = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("bitmask transitions") {
    BitmaskState s{Bitmask(4), 0};
    auto s1 = apply_action(s, 2, 3);
    CHECK(s1.mask.test(2));
    CHECK(s1.mask.count() == 1);
    CHECK(s1.t == 3);
    CHECK(s1.mask.to_string() == "0100");

    BitmaskState s2{Bitmask::from_string("1110"), 9};
    auto s3 = apply_action(s2, 0, 1);
    CHECK(s3.mask.all());
    CHECK(s3.t == 10);
    CHECK(s3.mask.to_string() == "1111");

    BitmaskState s4{Bitmask::from_string("0001"), 0};
    CHECK_THROWS_AS(apply_action(s4, 0, 1), IllegalTransition);
}

TEST_CASE("property: transitions only add bits") {
    testing::Gen gen(5);
    for (int n = 0; n < 200; ++n) {
        const std::size_t w = static_cast<std::size_t>(gen.integer(1, 130));
        BitmaskState s{Bitmask(w), 0};
        while (!s.mask.all()) {
            std::size_t i = static_cast<std::size_t>(gen.integer(0, static_cast<int>(w) - 1));
            if (s.mask.test(i)) {
                CHECK_THROWS_AS(apply_action(s, i, 1), IllegalTransition);
                continue;
            }
            auto next = apply_action(s, i, gen.integer(1, 9));
            CHECK(next.mask.contains(s.mask));
            CHECK(next.mask.count() == s.mask.count() + 1);
            CHECK(next.t > s.t);
            CHECK(Bitmask::from_string(next.mask.to_string()) == next.mask);
            s = next;
        }
    }
}

TEST_CASE("state space reduction") {
    CHECK(state_space_reduction({2, 2}) == doctest::Approx(25.0));
    CHECK(state_space_reduction({10, 10}) == doctest::Approx(100.0 * (1.0 - 2052.0 / 1048576.0)));
    CHECK_THROWS_AS(state_space_reduction({2}), DomainError);
    CHECK_THROWS_AS(state_space_reduction({2, 1}), DomainError);
}
