#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "dirac/errors.hpp"
#include "dirac/grid.hpp"
#include "dirac/ode.hpp"

using namespace dirac;

namespace {

std::vector<double> sample(const RadialGrid& g, auto f) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.r[i]);
    return out;
}

} // namespace

TEST_CASE("grid construction") {
    const auto g = RadialGrid::logarithmic(1e-4, 50.0, 1001);
    REQUIRE(g.size() == 1001);
    CHECK(g.r.front() == doctest::Approx(1e-4));
    CHECK(g.r.back() == doctest::Approx(50.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.r[i] > g.r[i - 1]);
    CHECK(g.r_of(g.t_of(3.7)) == doctest::Approx(3.7));
    CHECK(g.jac[10] == doctest::Approx(g.r[10]));
    CHECK_FALSE(g.starts_at_origin());

    const auto s = RadialGrid::shifted_log(0.1, 30.0, 800, 2.0);
    CHECK(s.starts_at_origin());
    CHECK(s.r.front() == 0.0);
    CHECK(s.r.back() == doctest::Approx(30.0));
    CHECK(s.jac_of(0.0) == doctest::Approx(0.1));
    CHECK(s.same_as(RadialGrid::shifted_log(0.1, 30.0, 800, 2.0)));
    CHECK_FALSE(s.same_as(g));
}

TEST_CASE("quadrature of known integrals") {
    const auto g = RadialGrid::logarithmic(1e-6, 60.0, 2001);
    // r^2 e^{-r} and r e^{-2r}, the second needing the origin piece to reach full accuracy
    const auto one = sample(g, [](double) { return 1.0; });
    const auto f = sample(g, [](double r) { return r * r * std::exp(-r); });
    CHECK(inner_product(f, one, g) == doctest::Approx(2.0).epsilon(1e-10));
    const auto u = sample(g, [](double r) { return std::sqrt(r) * std::exp(-r); });
    CHECK(inner_product(u, u, g) == doctest::Approx(0.25).epsilon(1e-10));

    const auto s = RadialGrid::shifted_log(0.05, 60.0, 1500, 2.0);
    const auto e = sample(s, [](double r) { return std::exp(-r); });
    CHECK(inner_product(e, e, s) == doctest::Approx(1.0).epsilon(1e-10));

    const auto w = sample(g, [](double r) { return r; });
    const auto ex = sample(g, [](double r) { return std::exp(-r); });
    CHECK(weighted_inner_product(ex, w, ex, g) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("orthogonal test pair") {
    // sin(r) and cos(r) on [0, pi] are orthogonal; use a grid ending at pi
    const auto g = RadialGrid::shifted_log(0.5, std::numbers::pi, 801);
    const auto u = sample(g, [](double r) { return std::sin(r); });
    const auto v = sample(g, [](double r) { return std::cos(r); });
    CHECK(std::abs(inner_product(u, v, g)) < 1e-9);
    CHECK(inner_product(u, u, g) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
}

TEST_CASE("quadrature converges at 4th order") {
    auto err = [](int n) {
        const auto g = RadialGrid::shifted_log(0.3, 40.0, n);
        const auto u = sample(g, [](double r) { return r * std::exp(-r); });
        return std::abs(inner_product(u, u, g) - 0.25);
    };
    const double e1 = err(101), e2 = err(201), e3 = err(401);
    const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
    CAPTURE(e1);
    CAPTURE(e2);
    CAPTURE(e3);
    CHECK(p1 > 3.7);
    CHECK(p2 > 3.7);
}

TEST_CASE("odd interval counts use the 3/8 end correction") {
    for (int n : {300, 301}) {
        const auto g = RadialGrid::shifted_log(0.3, 40.0, n);
        const auto u = sample(g, [](double r) { return r * std::exp(-r); });
        CHECK(inner_product(u, u, g) == doctest::Approx(0.25).epsilon(1e-7));
    }
}

TEST_CASE("discrete derivative is 4th order and anti-symmetric for decaying pairs") {
    auto max_err = [](int n) {
        const auto g = RadialGrid::shifted_log(0.3, 30.0, n);
        const auto u = sample(g, [](double r) { return std::sin(r) * std::exp(-0.5 * r); });
        const auto du = derivative(u, g);
        double e = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = g.r[i];
            e = std::max(e, std::abs(du[i] - std::exp(-0.5 * r) * (std::cos(r) - 0.5 * std::sin(r))));
        }
        return e;
    };
    CHECK(std::log2(max_err(400) / max_err(800)) > 3.5);

    const auto g = RadialGrid::logarithmic(1e-6, 60.0, 3000);
    const auto u = sample(g, [](double r) { return r * std::exp(-r); });
    const auto v = sample(g, [](double r) { return r * r * std::exp(-0.7 * r); });
    const double anti = inner_product(u, derivative(v, g), g) + inner_product(derivative(u, g), v, g);
    CHECK(std::abs(anti) < 1e-9);
}

TEST_CASE("grid contract violations") {
    const auto g = RadialGrid::logarithmic(1e-3, 10.0, 100);
    std::vector<double> a(100, 1.0), b(99, 1.0);
    CHECK_THROWS_AS(inner_product(a, b, g), ContractViolation);
    CHECK_THROWS_AS(weighted_inner_product(a, a, b, g), ContractViolation);
    CHECK_THROWS_AS(derivative(b, g), ContractViolation);
}

TEST_CASE("sign change counting with dead-band") {
    std::vector<double> u = {1.0, 0.5, 1e-15, -1e-15, 1e-15, -0.2, -0.3, 0.0, 0.4};
    CHECK(count_sign_changes(u, 0.0) == 4);
    CHECK(count_sign_changes(u, 1e-12) == 2);
    CHECK(count_sign_changes(std::vector<double>{}, 0.0) == 0);
}

TEST_CASE("dopri5 reproduces exp and harmonic motion with dense output") {
    std::vector<double> t_out = {0.1, 0.25, 0.7, 1.3, 2.0};
    std::vector<double> got(t_out.size());
    const auto y1 = ode::integrate<1>([](double, const ode::Vec<1>& y) { return ode::Vec<1>{-y[0]}; }, 0.0,
                                      ode::Vec<1>{1.0}, 2.0, {1e-11, 1e-13}, t_out,
                                      [&](std::size_t i, const ode::Vec<1>& y) { got[i] = y[0]; },
                                      [](double t) { return t; });
    CHECK(y1[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    for (std::size_t i = 0; i < t_out.size(); ++i) CHECK(got[i] == doctest::Approx(std::exp(-t_out[i])).epsilon(1e-9));

    // backward integration of the oscillator, sorted in the direction of travel
    std::vector<double> back = {9.0, 5.0, 1.0};
    std::vector<double> pos(back.size());
    ode::Stats stats;
    const auto y2 = ode::integrate<2>(
        [](double, const ode::Vec<2>& y) { return ode::Vec<2>{y[1], -y[0]}; }, 10.0,
        ode::Vec<2>{std::cos(10.0), -std::sin(10.0)}, 0.0, {1e-11, 1e-13}, back,
        [&](std::size_t i, const ode::Vec<2>& y) { pos[i] = y[0]; }, [](double t) { return t; }, &stats);
    CHECK(y2[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(y2[1]) < 1e-9);
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(pos[i] == doctest::Approx(std::cos(back[i])).epsilon(1e-8));
    CHECK(stats.accepted > 0);
}

TEST_CASE("dopri5 reports step underflow with the radius") {
    std::vector<double> none;
    try {
        ode::integrate<1>([](double t, const ode::Vec<1>& y) { return ode::Vec<1>{y[0] * y[0] / (1.0 - t)}; }, 0.0,
                          ode::Vec<1>{1.0}, 2.0, {1e-10, 1e-12}, none, [](std::size_t, const ode::Vec<1>&) {},
                          [](double t) { return 100.0 * t; });
        FAIL("expected a NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.radius > 0.0);
        CHECK(e.radius <= 100.0);
    }
}
