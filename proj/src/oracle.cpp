#include "dirac/oracle.hpp"

#include <cmath>
#include <string>

#include "dirac/errors.hpp"

namespace dirac::oracle {

void CoulombLevel::validate() const {
    const double nr = n - j - 0.5;
    const double twice_j = 2.0 * j;
    if (n < 1) throw DomainError("principal quantum number must be >= 1");
    if (!(j >= 0.5) || std::abs(twice_j - std::round(twice_j)) > 1e-12 || std::lround(twice_j) % 2 != 1)
        throw DomainError("j must be a half-integer >= 1/2");
    if (nr < -1e-12) throw DomainError("n - j - 1/2 must be >= 0");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (!(alpha < j + 0.5)) throw DomainError("alpha must be below j + 1/2");
}

namespace {

struct Pieces {
    double s;     // sqrt((j+1/2)^2 - alpha^2)
    double denom; // n - j - 1/2 + s
    double x;     // alpha^2 / denom^2
};

Pieces pieces(const CoulombLevel& level) {
    level.validate();
    const double jh = level.j + 0.5;
    const double s = std::sqrt((jh - level.alpha) * (jh + level.alpha));
    const double denom = std::round(level.n - jh) + s;
    return {s, denom, level.alpha * level.alpha / (denom * denom)};
}

} // namespace

double coulomb_energy(const CoulombLevel& level) {
    const auto p = pieces(level);
    return 1.0 / std::sqrt(1.0 + p.x);
}

double coulomb_energy_derivative(const CoulombLevel& level) {
    const auto p = pieces(level);
    const double a = level.alpha;
    // d(denom)/d(alpha) = -alpha/s
    const double dx = 2.0 * a / (p.denom * p.denom) + 2.0 * a * a * a / (p.denom * p.denom * p.denom * p.s);
    return -0.5 * std::pow(1.0 + p.x, -1.5) * dx;
}

ChannelAssignment channel_of(const CoulombLevel& level, int tau, int d) {
    level.validate();
    if (d != 3) throw DomainError("the Coulomb formula describes d = 3 only");
    if (tau != 1 && tau != -1) throw DomainError("tau must be +1 or -1");
    const int base = static_cast<int>(std::lround(level.n - level.j - 0.5));
    const int n_r = tau < 0 ? base : base - 1;
    if (n_r < 0)
        throw DomainError("no tau=+1 state with n=" + std::to_string(level.n) + ", j=" + std::to_string(level.j));
    return {ChannelSpec::radial(3, tau, level.j), n_r};
}

} // namespace dirac::oracle
