#include "dirac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "dirac/errors.hpp"
#include "dirac/ode.hpp"

namespace dirac {

std::string_view to_string(Parity p) {
    return p == Parity::Even ? "even" : "odd";
}

ChannelSpec ChannelSpec::radial(int d, int tau, double j, double mass) {
    ChannelSpec c;
    c.d = d;
    c.tau = tau;
    c.j = j;
    c.mass = mass;
    c.validate();
    return c;
}

ChannelSpec ChannelSpec::line(Parity parity, double mass) {
    ChannelSpec c;
    c.d = 1;
    c.parity = parity;
    c.mass = mass;
    c.validate();
    return c;
}

void ChannelSpec::validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive");
    if (d < 1) throw ConfigError("dimension must be >= 1");
    if (d == 1) {
        if (tau || j) throw ConfigError("d = 1 takes a parity, not tau/j");
        if (!parity) throw ConfigError("d = 1 requires a parity (even or odd)");
        return;
    }
    if (parity) throw ConfigError("parity is only meaningful for d = 1");
    if (!tau || !j) throw ConfigError("d > 1 requires tau and j");
    if (*tau != 1 && *tau != -1) throw ConfigError("tau must be +1 or -1");
    const double twice = 2.0 * *j;
    if (!(*j >= 0.5) || std::abs(twice - std::round(twice)) > 1e-12 || std::lround(twice) % 2 != 1)
        throw ConfigError("j must be a half-integer >= 1/2");
    if (std::abs(k()) < 0.5) throw ConfigError("|k_d| must be at least 1/2");
}

double ChannelSpec::k() const {
    if (d == 1) return 0.0;
    return *tau * (*j + (d - 2) / 2.0);
}

void SolveConfig::validate() const {
    if (n_grid < 16) throw ConfigError("n_grid must be at least 16");
    if (scan_points < 4) throw ConfigError("scan_points must be at least 4");
    if (!(e_tol > 0.0) || !(ode_rel_tol > 0.0) || !(ode_abs_tol > 0.0))
        throw ConfigError("tolerances must be positive");
    if (!(match_scale > 0.0)) throw ConfigError("match_scale must be positive");
    if (r_max && !(*r_max > 0.0)) throw ConfigError("r_max must be positive");
    if (r0 && !(*r0 > 0.0)) throw ConfigError("r0 must be positive");
    if (r0 && r_max && !(*r0 < *r_max)) throw ConfigError("r0 must be below r_max");
    if (origin_scale && !(*origin_scale > 0.0)) throw ConfigError("origin_scale must be positive");
    if (r_match && !(*r_match > 0.0)) throw ConfigError("r_match must be positive");
}

namespace {

constexpr double kSeedError = 1e-8;
constexpr double kEdgeFraction = 1e-6;
constexpr double kDecayEfolds = 40.0;
constexpr double kNodeDeadband = 1e-12;
constexpr double kAcceptMismatch = 1e-5;
constexpr int kMaxBisections = 200;

double potential_at(const PotentialFamily& family, double r) {
    return r > 0.0 ? family.evaluate(r) : family.origin_value();
}

// Coordinate map shared by the integrator and the output grid.
struct Coord {
    bool shifted = false;
    double scale = 1.0;

    double r(double t) const { return shifted ? scale * std::expm1(t) : scale * std::exp(t); }
    double t(double radius) const { return shifted ? std::log1p(radius / scale) : std::log(radius / scale); }
    double jac(double t) const { return scale * std::exp(t); }
};

struct System {
    const PotentialFamily& family;
    double E, m, k;
    Coord coord;

    Spinor operator()(double t, const Spinor& y) const {
        const double r = coord.r(t);
        const double J = coord.jac(t);
        const double V = potential_at(family, r);
        const double kr = k == 0.0 ? 0.0 : k / r;
        return {J * ((E - V + m) * y[1] - kr * y[0]), J * ((V + m - E) * y[0] + kr * y[1])};
    }
};

Spinor unit(Spinor v) {
    const double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
}

double mismatch(const Spinor& out, const Spinor& in) {
    return (out[0] * in[1] - out[1] * in[0]) / (std::hypot(out[0], out[1]) * std::hypot(in[0], in[1]));
}

void check_gap(double E, double m) {
    if (!(std::abs(E) < m)) {
        std::ostringstream os;
        os.precision(17);
        os << "energy " << E << " lies outside the gap (-m, m); no bound state";
        throw NoSuchState(os.str());
    }
}

void check_regime(const ChannelSpec& channel, const PotentialFamily& family) {
    const auto origin = family.origin_class();
    if (channel.d == 1) {
        if (origin.singular()) throw ConfigError("the d = 1 sector requires a potential regular at the origin");
        return;
    }
    if (origin.singular() && std::abs(origin.strength) >= std::abs(channel.k())) {
        std::ostringstream os;
        os << "Coulomb strength " << origin.strength << " >= |k| = " << std::abs(channel.k())
           << ": origin exponent is not real";
        throw UnsupportedRegime(os.str());
    }
}

// Outermost radius where E - V(r) > m, i.e. the classical turning point.
std::optional<double> turning_point(double E, double m, const PotentialFamily& family) {
    const double rs = family.length_scale();
    auto allowed = [&](double r) { return E - family.evaluate(r) - m; };
    const double r_lo = 1e-6 * rs;
    double hi = 1e8 * rs;
    if (allowed(hi) > 0) return hi;
    double lo = hi;
    while (lo > r_lo) {
        lo = hi / 1.25;
        if (allowed(lo) > 0) break;
        hi = lo;
    }
    if (!(allowed(lo) > 0)) return std::nullopt;
    for (int i = 0; i < 60; ++i) {
        const double mid = std::sqrt(lo * hi);
        (allowed(mid) > 0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

ode::Tolerances tolerances(const SolveConfig& config) {
    return {config.ode_rel_tol, config.ode_abs_tol};
}

struct ShotEnds {
    Spinor outward, inward;
};

// Integrate both sides to the matching radius, optionally filling output
// samples for the given grid t-values.
ShotEnds shoot(double E, const ChannelSpec& channel, const PotentialFamily& family, const SolveConfig& config,
               const ShootingLayout& lay, const RadialGrid* grid, std::vector<double>* psi1,
               std::vector<double>* psi2) {
    const double m = channel.mass;
    Coord coord{channel.d == 1, lay.r0};
    System sys{family, E, m, channel.k(), coord};
    auto to_r = [&](double t) { return coord.r(t); };

    Spinor start;
    double t_start;
    if (channel.d == 1) {
        start = *channel.parity == Parity::Even ? Spinor{1.0, 0.0} : Spinor{0.0, 1.0};
        t_start = 0.0;
    } else {
        start = origin_seed(channel, family, E, lay.r_seed);
        t_start = coord.t(lay.r_seed);
    }
    const double t_match = coord.t(lay.r_match);
    const double t_end = coord.t(lay.r_end);

    std::vector<double> t_in, t_out;
    std::size_t split = 0;
    if (grid) {
        const auto ts = grid->t_values();
        while (split < ts.size() && grid->r[split] <= lay.r_match) ++split;
        t_out.assign(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(split));
        t_in.assign(ts.rbegin(), ts.rend() - static_cast<std::ptrdiff_t>(split));
        psi1->assign(ts.size(), 0.0);
        psi2->assign(ts.size(), 0.0);
    }
    const std::size_t n = grid ? grid->size() : 0;

    ShotEnds ends;
    ends.outward = ode::integrate<2>(
        sys, t_start, start, t_match, tolerances(config), t_out,
        [&](std::size_t i, const Spinor& y) {
            (*psi1)[i] = y[0];
            (*psi2)[i] = y[1];
        },
        to_r);
    ends.inward = ode::integrate<2>(
        sys, t_end, tail_seed(channel, E), t_match, tolerances(config), t_in,
        [&](std::size_t i, const Spinor& y) {
            (*psi1)[n - 1 - i] = y[0];
            (*psi2)[n - 1 - i] = y[1];
        },
        to_r);
    return ends;
}

double bisect(double lo, double hi, double m_lo, double tol, const std::function<double(double)>& f) {
    for (int i = 0; i < kMaxBisections && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (m_lo > 0)) {
            lo = mid;
            m_lo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Bracket {
    double lo, hi, m_lo, m_hi;
};

// Walk the energies in order, handing each sign change of M to `visit`;
// stops early when `visit` returns true.
template <class Visit>
bool for_each_bracket(const std::vector<double>& energies, const ChannelSpec& channel,
                      const PotentialFamily& family, const SolveConfig& config, Visit&& visit) {
    if (energies.empty()) return false;
    double prev_e = energies.front();
    double prev_m = match_function(prev_e, channel, family, config);
    for (std::size_t i = 1; i < energies.size(); ++i) {
        const double e = energies[i];
        const double m = match_function(e, channel, family, config);
        if (prev_m == 0.0) {
            if (visit(Bracket{prev_e, prev_e, 0.0, 0.0})) return true;
        } else if ((prev_m > 0) != (m > 0) && m != 0.0) {
            if (visit(Bracket{prev_e, e, prev_m, m})) return true;
        }
        prev_e = e;
        prev_m = m;
    }
    return false;
}

// Scan energies: half uniform in theta = arccos(E/m) over the whole gap, half
// log-spaced in theta towards the upper edge where Rydberg-like levels pile up.
std::vector<double> scan_energies(double e_lo, double e_hi, double m, int points) {
    const double th_lo = std::acos(std::clamp(e_hi / m, -1.0, 1.0));
    const double th_hi = std::acos(std::clamp(e_lo / m, -1.0, 1.0));
    std::vector<double> e;
    const int n_uniform = points / 2;
    const int n_log = points - n_uniform;
    for (int i = 0; i < n_uniform; ++i) e.push_back(m * std::cos(th_lo + (th_hi - th_lo) * i / (n_uniform - 1)));
    const double log_hi = std::min(th_hi, 1.0);
    if (log_hi > th_lo)
        for (int i = 0; i < n_log; ++i)
            e.push_back(m * std::cos(th_lo * std::pow(log_hi / th_lo, static_cast<double>(i) / (n_log - 1))));
    e.push_back(e_lo);
    e.push_back(e_hi);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    e.erase(std::remove_if(e.begin(), e.end(), [&](double x) { return x < e_lo || x > e_hi; }), e.end());
    return e;
}

struct Candidate {
    double E;
    BoundState state;
};

std::optional<Candidate> refine(const Bracket& b, const ChannelSpec& channel, const PotentialFamily& family,
                                const SolveConfig& config) {
    const double E = b.lo == b.hi ? b.lo
                                  : bisect(b.lo, b.hi, b.m_lo, config.e_tol, [&](double e) {
                                        return match_function(e, channel, family, config);
                                    });
    auto state = assemble_state(E, channel, family, config);
    // a sign flip caused by a jump of the matching radius is not a root
    if (state.match_residual > kAcceptMismatch) return std::nullopt;
    return Candidate{E, std::move(state)};
}

std::string describe_levels(const std::vector<Level>& levels) {
    std::ostringstream os;
    os.precision(10);
    if (levels.empty()) return "none";
    for (std::size_t i = 0; i < levels.size(); ++i)
        os << (i ? ", " : "") << "(E=" << levels[i].E << ", nodes=" << levels[i].nodes << ")";
    return os.str();
}

} // namespace

Spinor rhs(double r, const Spinor& psi, double E, const ChannelSpec& channel, const PotentialFamily& family) {
    const double k = channel.k();
    const double m = channel.mass;
    const double V = potential_at(family, r);
    const double kr = k == 0.0 ? 0.0 : k / r;
    return {(E - V + m) * psi[1] - kr * psi[0], (V + m - E) * psi[0] + kr * psi[1]};
}

Spinor origin_seed(const ChannelSpec& channel, const PotentialFamily& family, double E, double r0) {
    if (channel.d == 1) throw ConfigError("origin_seed applies to d > 1; d = 1 uses parity conditions");
    check_regime(channel, family);
    const double k = channel.k();
    const double m = channel.mass;
    const auto origin = family.origin_class();
    if (origin.singular()) {
        const double alpha = origin.strength;
        const double gamma = std::sqrt(k * k - alpha * alpha);
        // psi1 = r^gamma, psi2 = (gamma + k)/alpha r^gamma; for k < 0 use the
        // equivalent -alpha/(gamma - k), which stays finite as alpha -> 0
        const double ratio = k < 0 ? -alpha / (gamma - k) : (gamma + k) / alpha;
        return unit({1.0, ratio});
    }
    const double V0 = family.origin_value();
    if (k > 0) return unit({(E - V0 + m) * r0 / (2 * k + 1), 1.0});
    return unit({1.0, (V0 + m - E) * r0 / (2 * -k + 1)});
}

double origin_seed_error(const ChannelSpec& channel, const PotentialFamily& family, double E, double r0) {
    const double m = channel.mass;
    const auto origin = family.origin_class();
    if (origin.singular()) {
        const double s = std::abs(E) + m + std::abs(family.evaluate(r0) + origin.strength / r0);
        return s * r0;
    }
    const double V0 = family.origin_value();
    const double s = std::abs(E) + m + std::abs(V0);
    return (s * r0) * (s * r0) + s * r0 * std::abs(family.evaluate(r0) - V0);
}

Spinor tail_seed(const ChannelSpec& channel, double E) {
    const double m = channel.mass;
    check_gap(E, m);
    return unit({1.0, -std::sqrt((m - E) / (m + E))});
}

ShootingLayout shooting_layout(double E, const ChannelSpec& channel, const PotentialFamily& family,
                               const SolveConfig& config) {
    const double m = channel.mass;
    check_gap(E, m);
    const double lambda = std::sqrt((m - E) * (m + E));
    const double rs = family.length_scale();

    ShootingLayout lay;
    double r_match;
    if (config.r_match) {
        r_match = *config.r_match;
    } else {
        r_match = turning_point(E, m, family).value_or(rs) * config.match_scale;
    }
    if (config.r_max) {
        lay.r_end = *config.r_max;
        if (!(r_match < lay.r_end)) r_match = lay.r_end / 3.0;
    } else {
        lay.r_end = std::max(r_match + kDecayEfolds / lambda, 20.0 * rs);
    }

    if (channel.d == 1) {
        lay.r0 = config.origin_scale.value_or(0.1 * rs);
        lay.r_seed = 0.0;
        lay.r_match = std::clamp(r_match, 1e-3 * lay.r0, lay.r_end / 1.5);
    } else {
        lay.r0 = config.r0.value_or(1e-6 * lay.r_end);
        lay.r_seed = lay.r0;
        for (int i = 0; i < 400 && origin_seed_error(channel, family, E, lay.r_seed) > kSeedError; ++i)
            lay.r_seed *= 0.5;
        lay.r_match = std::clamp(r_match, 100.0 * lay.r0, lay.r_end / 1.5);
    }
    return lay;
}

double match_function(double E, const ChannelSpec& channel, const PotentialFamily& family,
                      const SolveConfig& config) {
    const auto lay = shooting_layout(E, channel, family, config);
    const auto ends = shoot(E, channel, family, config, lay, nullptr, nullptr, nullptr);
    return mismatch(ends.outward, ends.inward);
}

BoundState assemble_state(double E, const ChannelSpec& channel, const PotentialFamily& family,
                          const SolveConfig& config) {
    const auto lay = shooting_layout(E, channel, family, config);
    BoundState s{channel, family, E, {}, {}, {}, 0, 0, 0.0, 0.0, lay.r_match};
    s.grid = channel.d == 1 ? RadialGrid::shifted_log(lay.r0, lay.r_end, config.n_grid, 2.0)
                            : RadialGrid::logarithmic(lay.r0, lay.r_end, config.n_grid);
    const auto ends = shoot(E, channel, family, config, lay, &s.grid, &s.psi1, &s.psi2);
    s.match_residual = std::abs(mismatch(ends.outward, ends.inward));

    // scale the inward branch onto the outward one at r_match
    const auto& o = ends.outward;
    const auto& in = ends.inward;
    const double fit = (o[0] * in[0] + o[1] * in[1]) / (in[0] * in[0] + in[1] * in[1]);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        if (s.grid.r[i] > lay.r_match) {
            s.psi1[i] *= fit;
            s.psi2[i] *= fit;
        }
    }

    const double norm = std::sqrt(inner_product(s.psi1, s.psi1, s.grid) + inner_product(s.psi2, s.psi2, s.grid));
    double peak = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        s.psi1[i] /= norm;
        s.psi2[i] /= norm;
        peak = std::max(peak, std::abs(s.psi1[i]));
    }
    // phase: psi1 positive at the first significant sample
    for (double x : s.psi1) {
        if (std::abs(x) <= kNodeDeadband * peak) continue;
        if (x < 0) {
            for (auto& v : s.psi1) v = -v;
            for (auto& v : s.psi2) v = -v;
        }
        break;
    }
    double peak2 = 0.0;
    for (double x : s.psi2) peak2 = std::max(peak2, std::abs(x));
    s.nodes = count_sign_changes(s.psi1, kNodeDeadband * peak);
    s.nodes_psi2 = count_sign_changes(s.psi2, kNodeDeadband * peak2);
    s.norm_residual =
        std::abs(inner_product(s.psi1, s.psi1, s.grid) + inner_product(s.psi2, s.psi2, s.grid) - 1.0);
    return s;
}

std::vector<Level> scan_spectrum(const ChannelSpec& channel, const PotentialFamily& family,
                                 const SolveConfig& config) {
    channel.validate();
    config.validate();
    check_regime(channel, family);
    const double m = channel.mass;
    const double eps = kEdgeFraction * m;
    std::vector<Level> levels;
    for_each_bracket(scan_energies(-m + eps, m - eps, m, config.scan_points), channel, family, config,
                     [&](const Bracket& b) {
                         if (auto c = refine(b, channel, family, config)) levels.push_back({c->E, c->state.nodes});
                         return false;
                     });
    return levels;
}

BoundState solve(const ChannelSpec& channel, const PotentialFamily& family, int n_r, const SolveConfig& config) {
    channel.validate();
    config.validate();
    if (n_r < 0) throw ConfigError("node count must be >= 0");
    check_regime(channel, family);
    const double m = channel.mass;
    const double eps = kEdgeFraction * m;

    std::vector<Level> found;
    auto search = [&](double lo, double hi, int points) -> std::optional<BoundState> {
        std::optional<BoundState> hit;
        for_each_bracket(scan_energies(lo, hi, m, points), channel, family, config, [&](const Bracket& b) {
            auto c = refine(b, channel, family, config);
            if (!c) return false;
            found.push_back({c->E, c->state.nodes});
            if (c->state.nodes != n_r) return false;
            hit = std::move(c->state);
            return true;
        });
        return hit;
    };

    if (auto s = search(-m + eps, m - eps, config.scan_points)) return std::move(*s);

    // Missing label: two roots may share one scan cell. Rescan the gaps
    // between levels whose labels skip over n_r, and the region above the top level.
    for (int round = 0; round < 3; ++round) {
        std::sort(found.begin(), found.end(), [](const Level& a, const Level& b) { return a.E < b.E; });
        std::vector<std::pair<double, double>> windows;
        double top = -m + eps;
        int top_nodes = -1;
        for (std::size_t i = 0; i + 1 < found.size(); ++i)
            if (found[i].nodes < n_r && found[i + 1].nodes > n_r) windows.emplace_back(found[i].E, found[i + 1].E);
        for (const auto& l : found) {
            if (l.E > top) top = l.E;
            top_nodes = std::max(top_nodes, l.nodes);
        }
        if (top_nodes < n_r && !found.empty()) windows.emplace_back(top, m - eps);
        if (windows.empty()) break;
        const auto before = found.size();
        for (const auto& [lo, hi] : windows) {
            const double pad = 1e-3 * (hi - lo);
            if (auto s = search(lo + pad, hi - pad, std::max(32, config.scan_points / 2))) return std::move(*s);
        }
        // drop duplicates found again
        std::sort(found.begin(), found.end(), [](const Level& a, const Level& b) { return a.E < b.E; });
        found.erase(std::unique(found.begin(), found.end(),
                                [&](const Level& a, const Level& b) {
                                    return a.nodes == b.nodes && std::abs(a.E - b.E) < 10 * config.e_tol;
                                }),
                    found.end());
        if (found.size() == before) break;
    }

    std::sort(found.begin(), found.end(), [](const Level& a, const Level& b) { return a.E < b.E; });
    throw NoSuchState("no bound state with " + std::to_string(n_r) + " nodes in this channel; found " +
                      describe_levels(found));
}

BoundState solve_1d(const ChannelSpec& channel, const PotentialFamily& family, int n_r, const SolveConfig& config) {
    if (channel.d != 1) throw ConfigError("solve_1d requires d = 1");
    return solve(channel, family, n_r, config);
}

BoundState solve_near(const ChannelSpec& channel, const PotentialFamily& family, double E_guess,
                      const SolveConfig& config) {
    channel.validate();
    config.validate();
    check_regime(channel, family);
    const double m = channel.mass;
    const double eps = kEdgeFraction * m;
    check_gap(E_guess, m);
    double w = std::max(1e-6 * m, 1e-3 * (m - std::abs(E_guess)));
    for (int attempt = 0; attempt < 10; ++attempt, w *= 4.0) {
        const double lo = std::max(-m + eps, E_guess - w);
        const double hi = std::min(m - eps, E_guess + w);
        std::vector<double> energies;
        for (int i = 0; i <= 8; ++i) energies.push_back(lo + (hi - lo) * i / 8.0);
        std::optional<Candidate> best;
        for_each_bracket(energies, channel, family, config, [&](const Bracket& b) {
            auto c = refine(b, channel, family, config);
            if (c && (!best || std::abs(c->E - E_guess) < std::abs(best->E - E_guess))) best = std::move(c);
            return false;
        });
        if (best) return std::move(best->state);
    }
    std::ostringstream os;
    os.precision(12);
    os << "no eigenvalue found near E = " << E_guess;
    throw NoSuchState(os.str());
}

double antisymmetry_residual(const BoundState& state) {
    const auto d1 = derivative(state.psi1, state.grid);
    const auto d2 = derivative(state.psi2, state.grid);
    return std::abs(inner_product(state.psi1, d2, state.grid) + inner_product(d1, state.psi2, state.grid));
}

double eigen_residual(const BoundState& state, int skip) {
    const auto& g = state.grid;
    const auto d1 = derivative(state.psi1, g);
    const auto d2 = derivative(state.psi2, g);
    const double k = state.channel.k();
    const double m = state.channel.mass;
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        peak = std::max({peak, std::abs(state.psi1[i]), std::abs(state.psi2[i])});
    double worst = 0.0;
    for (std::size_t i = static_cast<std::size_t>(skip); i + static_cast<std::size_t>(skip) < g.size(); ++i) {
        const double r = g.r[i];
        const double V = potential_at(state.family, r);
        const double kr = k == 0.0 ? 0.0 : k / r;
        const double r1 = (V + m - state.E) * state.psi1[i] - d2[i] + kr * state.psi2[i];
        const double r2 = d1[i] + kr * state.psi1[i] + (V - m - state.E) * state.psi2[i];
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return worst / peak;
}

} // namespace dirac
