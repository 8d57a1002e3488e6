#include "dirac/grid.hpp"

#include <cmath>
#include <string>

#include "dirac/errors.hpp"

namespace dirac {

RadialGrid RadialGrid::logarithmic(double r0, double r_max, int n) {
    if (!(r0 > 0.0) || !(r_max > r0)) throw ConfigError("logarithmic grid needs 0 < r0 < r_max");
    if (n < 8) throw ConfigError("grid needs at least 8 points");
    RadialGrid g;
    g.kind = Kind::Logarithmic;
    g.scale = r0;
    g.step = std::log(r_max / r0) / (n - 1);
    g.r.resize(n);
    g.jac.resize(n);
    for (int i = 0; i < n; ++i) {
        g.r[i] = r0 * std::exp(g.step * i);
        g.jac[i] = g.r[i];
    }
    g.r.back() = r_max;
    g.jac.back() = r_max;
    return g;
}

RadialGrid RadialGrid::shifted_log(double s, double r_max, int n, double measure) {
    if (!(s > 0.0) || !(r_max > 0.0)) throw ConfigError("shifted grid needs s > 0 and r_max > 0");
    if (n < 8) throw ConfigError("grid needs at least 8 points");
    RadialGrid g;
    g.kind = Kind::ShiftedLog;
    g.scale = s;
    g.measure = measure;
    g.step = std::log1p(r_max / s) / (n - 1);
    g.r.resize(n);
    g.jac.resize(n);
    for (int i = 0; i < n; ++i) {
        g.r[i] = s * std::expm1(g.step * i);
        g.jac[i] = g.r[i] + s;
    }
    g.r.back() = r_max;
    g.jac.back() = r_max + s;
    return g;
}

double RadialGrid::t_of(double radius) const {
    return kind == Kind::Logarithmic ? std::log(radius / scale) : std::log1p(radius / scale);
}

double RadialGrid::r_of(double t) const {
    return kind == Kind::Logarithmic ? scale * std::exp(t) : scale * std::expm1(t);
}

double RadialGrid::jac_of(double t) const {
    return scale * std::exp(t);
}

std::vector<double> RadialGrid::t_values() const {
    std::vector<double> t(r.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = step * static_cast<double>(i);
    return t;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
    return kind == other.kind && scale == other.scale && step == other.step && measure == other.measure &&
           r.size() == other.r.size() && r.back() == other.r.back();
}

namespace {

void check_sizes(std::size_t a, std::size_t b, const RadialGrid& grid) {
    if (a != grid.size() || b != grid.size())
        throw ContractViolation("array of size " + std::to_string(a == grid.size() ? b : a) +
                                " does not live on a grid of " + std::to_string(grid.size()) + " points");
}

// integral over [0, r0] of a function known at r0 and r1, assuming f ~ r^q
double origin_piece(double f0, double f1, double r0, double r1) {
    if (f0 == 0.0 || f1 == 0.0 || (f0 > 0) != (f1 > 0)) return 0.0;
    const double q = std::log(f1 / f0) / std::log(r1 / r0);
    if (!(q > -1.0 + 1e-6)) return 0.0;
    return f0 * r0 / (q + 1.0);
}

template <class F>
double integrate_samples(F&& integrand, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    const std::size_t intervals = n - 1;
    const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
    double sum = 0.0;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        sum += (integrand(i) + 4.0 * integrand(i + 1) + integrand(i + 2)) * grid.step / 3.0;
    }
    if (simpson_end != intervals) {
        const std::size_t i = simpson_end;
        sum += 3.0 * grid.step / 8.0 *
               (integrand(i) + 3.0 * integrand(i + 1) + 3.0 * integrand(i + 2) + integrand(i + 3));
    }
    return sum;
}

} // namespace

double weighted_inner_product(std::span<const double> u, std::span<const double> w, std::span<const double> v,
                              const RadialGrid& grid) {
    check_sizes(u.size(), v.size(), grid);
    check_sizes(w.size(), w.size(), grid);
    auto f = [&](std::size_t i) { return u[i] * w[i] * v[i]; };
    double sum = integrate_samples([&](std::size_t i) { return f(i) * grid.jac[i]; }, grid);
    if (!grid.starts_at_origin()) sum += origin_piece(f(0), f(1), grid.r[0], grid.r[1]);
    return grid.measure * sum;
}

double inner_product(std::span<const double> u, std::span<const double> v, const RadialGrid& grid) {
    check_sizes(u.size(), v.size(), grid);
    auto f = [&](std::size_t i) { return u[i] * v[i]; };
    double sum = integrate_samples([&](std::size_t i) { return f(i) * grid.jac[i]; }, grid);
    if (!grid.starts_at_origin()) sum += origin_piece(f(0), f(1), grid.r[0], grid.r[1]);
    return grid.measure * sum;
}

std::vector<double> derivative(std::span<const double> u, const RadialGrid& grid) {
    check_sizes(u.size(), u.size(), grid);
    const std::size_t n = u.size();
    const double h12 = 12.0 * grid.step;
    std::vector<double> d(n);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / h12;
    d[0] = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / h12;
    d[1] = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / h12;
    d[n - 2] = (3.0 * u[n - 1] + 10.0 * u[n - 2] - 18.0 * u[n - 3] + 6.0 * u[n - 4] - u[n - 5]) / h12;
    d[n - 1] = (25.0 * u[n - 1] - 48.0 * u[n - 2] + 36.0 * u[n - 3] - 16.0 * u[n - 4] + 3.0 * u[n - 5]) / h12;
    for (std::size_t i = 0; i < n; ++i) d[i] /= grid.jac[i];
    return d;
}

int count_sign_changes(std::span<const double> u, double deadband) {
    int changes = 0;
    int last = 0;
    for (double x : u) {
        if (std::abs(x) <= deadband) continue;
        const int s = x > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

} // namespace dirac
