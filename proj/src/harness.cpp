#include "dirac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace dirac::harness {

namespace {

// dV/da on a grid point; the d = 1 grid contains r = 0 where the regular
// families have a finite limit.
double va_at(const PotentialFamily& family, double r) {
    if (r > 0.0) return family.param_derivative(r);
    return family.param_derivative(1e-14 * family.length_scale());
}

double v_at(const PotentialFamily& family, double r) {
    return r > 0.0 ? family.evaluate(r) : family.origin_value();
}

void require_same_grid(const BoundState& a, const BoundState& b) {
    if (!a.grid.same_as(b.grid)) throw ContractViolation("stencil states do not share the central grid");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

double default_step(double a) {
    return std::max(1e-4, 1e-3 * std::abs(a));
}

SolveConfig derivative_config(const SolveConfig& base) {
    SolveConfig c = base;
    c.e_tol = std::min(base.e_tol, 1e-13);
    c.ode_rel_tol = std::min(base.ode_rel_tol, 1e-12);
    c.ode_abs_tol = std::min(base.ode_abs_tol, 1e-14);
    return c;
}

SolveConfig pinned_config(const SolveConfig& base, const BoundState& state) {
    SolveConfig c = base;
    c.n_grid = static_cast<int>(state.grid.size());
    c.r_max = state.grid.r.back();
    if (state.grid.starts_at_origin())
        c.origin_scale = state.grid.scale;
    else
        c.r0 = state.grid.scale;
    return c;
}

double hf_derivative(const BoundState& state, const PotentialFamily& family) {
    const auto& g = state.grid;
    std::vector<double> va(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) va[i] = va_at(family, g.r[i]);
    return weighted_inner_product(state.psi1, va, state.psi1, g) + weighted_inner_product(state.psi2, va, state.psi2, g);
}

Stencil compute_stencil(const PotentialFamily& family, const ChannelSpec& channel, int n_r, double a, double h,
                        const SolveConfig& config) {
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
    const auto& key = family.active_param();
    const SolveConfig tight = derivative_config(config);

    const auto center_family = family.with_param(key, a);
    auto center = solve(channel, center_family, n_r, tight);
    const double slope = hf_derivative(center, center_family);
    const SolveConfig pinned = pinned_config(tight, center);

    auto neighbour = [&](double offset) {
        const auto f = family.with_param(key, a + offset);
        auto st = solve_near(channel, f, center.E + offset * slope, pinned);
        if (st.nodes != n_r) {
            std::ostringstream os;
            os.precision(10);
            os << "node label changed from " << n_r << " to " << st.nodes << " between " << key << " = " << a
               << " and " << a + offset;
            throw LevelCrossing(os.str());
        }
        return st;
    };
    auto minus = neighbour(-h);
    auto plus = neighbour(h);
    const double e_minus_half = neighbour(-0.5 * h).E;
    const double e_plus_half = neighbour(0.5 * h).E;
    require_same_grid(center, minus);
    require_same_grid(center, plus);
    return Stencil{a, h, std::move(center), std::move(minus), std::move(plus), e_minus_half, e_plus_half};
}

double fd_derivative(const Stencil& s) {
    const double d_h = (s.plus.E - s.minus.E) / (2.0 * s.h);
    const double d_half = (s.E_plus_half - s.E_minus_half) / s.h;
    return (4.0 * d_half - d_h) / 3.0;
}

double fd_derivative(const PotentialFamily& family, const ChannelSpec& channel, int n_r, double a,
                     std::optional<double> h, const SolveConfig& config) {
    return fd_derivative(compute_stencil(family, channel, n_r, a, h.value_or(default_step(a)), config));
}

ParamDerivative wavefunction_param_derivative(const Stencil& s) {
    ParamDerivative pd;
    const std::size_t n = s.center.grid.size();
    pd.psi1a.resize(n);
    pd.psi2a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pd.psi1a[i] = (s.plus.psi1[i] - s.minus.psi1[i]) / (2.0 * s.h);
        pd.psi2a[i] = (s.plus.psi2[i] - s.minus.psi2[i]) / (2.0 * s.h);
    }
    return pd;
}

ParamDerivative wavefunction_param_derivative(const PotentialFamily& family, const ChannelSpec& channel, int n_r,
                                              double a, std::optional<double> h, const SolveConfig& config) {
    return wavefunction_param_derivative(
        compute_stencil(family, channel, n_r, a, h.value_or(default_step(a)), config));
}

double orthogonality_residual(const BoundState& state, const ParamDerivative& pd) {
    return std::abs(inner_product(pd.psi1a, state.psi1, state.grid) + inner_product(pd.psi2a, state.psi2, state.grid));
}

double w_residual(const BoundState& state, const ParamDerivative& pd, const PotentialFamily& family) {
    const auto& g = state.grid;
    const std::size_t n = g.size();
    if (pd.psi1a.size() != n || pd.psi2a.size() != n) throw ContractViolation("psi_a arrays are not on the state grid");
    const double m = state.channel.mass;
    const double k = state.channel.k();
    const double E = state.E;

    const auto d1a = derivative(pd.psi1a, g);
    const auto d2a = derivative(pd.psi2a, g);
    std::vector<double> vp(n), vm(n), minus_d_psi2a(n), plus_d_psi1a(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.r[i];
        const double V = v_at(family, r);
        const double kr = k == 0.0 ? 0.0 : k / r;
        vp[i] = (V + m) * state.psi1[i];
        vm[i] = (V - m) * state.psi2[i];
        minus_d_psi2a[i] = -d2a[i] + kr * pd.psi2a[i];
        plus_d_psi1a[i] = d1a[i] + kr * pd.psi1a[i];
    }
    const double w = inner_product(pd.psi1a, vp, g) + inner_product(state.psi1, minus_d_psi2a, g) -
                     E * inner_product(pd.psi1a, state.psi1, g) + inner_product(pd.psi2a, vm, g) +
                     inner_product(state.psi2, plus_d_psi1a, g) - E * inner_product(pd.psi2a, state.psi2, g);
    return std::abs(w);
}

SweepRecord sweep_point(const PotentialFamily& family, const ChannelSpec& channel, int n_r, double a,
                        const HarnessOptions& options) {
    const double h = options.step.value_or(default_step(a));
    const auto s = compute_stencil(family, channel, n_r, a, h, options.solve);
    const auto fam = family.with_param(family.active_param(), a);
    const auto pd = wavefunction_param_derivative(s);
    SweepRecord rec;
    rec.a = a;
    rec.E = s.center.E;
    rec.nodes = s.center.nodes;
    rec.dE_hf = hf_derivative(s.center, fam);
    rec.dE_fd = fd_derivative(s);
    rec.hf_residual = std::abs(rec.dE_fd - rec.dE_hf);
    rec.orth_residual = orthogonality_residual(s.center, pd);
    rec.w_residual = w_residual(s.center, pd, fam);
    return rec;
}

std::vector<SweepRecord> sweep(const PotentialFamily& family, const ChannelSpec& channel, int n_r,
                               const std::vector<double>& a_grid, const HarnessOptions& options) {
    if (a_grid.size() < 2) throw ConfigError("a sweep needs at least two parameter values");
    for (std::size_t i = 1; i < a_grid.size(); ++i)
        if (!(a_grid[i] > a_grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing");

    const std::size_t n = a_grid.size();
    std::vector<std::optional<SweepRecord>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = sweep_point(family, channel, n_r, a_grid[i], options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(options.workers, 1, static_cast<int>(n));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::vector<SweepRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::string why = "unknown error";
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                why = e.what();
            } catch (...) {
            }
            throw SweepAborted("sweep aborted at " + family.active_param() + " = " + fmt(a_grid[i]) + ": " + why,
                               std::move(records), errors[i]);
        }
        records.push_back(*results[i]);
    }

    // Level tracking: a jump in E that the derivative cannot account for
    // means a different level was picked up.
    for (std::size_t i = 1; i < n; ++i) {
        const auto& p = records[i - 1];
        const auto& q = records[i];
        const double bound = 3.0 * std::max(std::abs(p.dE_hf), std::abs(q.dE_hf)) * (q.a - p.a) +
                             100.0 * options.solve.e_tol;
        if (std::abs(q.E - p.E) > bound) {
            auto partial = std::vector<SweepRecord>(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(i));
            auto err = std::make_exception_ptr(LevelCrossing("eigenvalue jumps between " + fmt(p.a) + " and " +
                                                             fmt(q.a) + "; refine the sweep grid"));
            throw SweepAborted("sweep aborted: discontinuous E(a) between " + fmt(p.a) + " and " + fmt(q.a),
                               std::move(partial), err);
        }
    }
    return records;
}

std::vector<double> linear_grid(double from, double to, int steps) {
    if (steps < 2) throw ConfigError("a sweep needs at least two points");
    if (!(to > from)) throw ConfigError("sweep range must be increasing");
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) g[i] = from + (to - from) * i / (steps - 1);
    g.back() = to;
    return g;
}

std::vector<double> log_grid(double from, double to, int steps) {
    if (steps < 2) throw ConfigError("a sweep needs at least two points");
    if (!(from > 0.0) || !(to > from)) throw ConfigError("log sweep needs 0 < from < to");
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) g[i] = from * std::pow(to / from, static_cast<double>(i) / (steps - 1));
    g.back() = to;
    return g;
}

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::NotApplicable: return "not-applicable";
    }
    return "?";
}

SignClass observed_sign(const std::vector<SweepRecord>& records, double tol) {
    bool neg = false, pos = false;
    for (const auto& r : records) {
        neg |= r.dE_hf < -tol;
        pos |= r.dE_hf > tol;
    }
    if (!neg) return SignClass::NonNegative;
    if (!pos) return SignClass::NonPositive;
    return SignClass::Indefinite;
}

Verdict verdict(const std::vector<SweepRecord>& records, SignClass sign_class, const Tolerances& tol) {
    Verdict v;
    v.hypothesis = sign_class;
    v.tolerances = tol;
    v.conclusion = observed_sign(records, tol.sign);
    for (const auto& r : records) {
        v.max_hf_residual = std::max(v.max_hf_residual, r.hf_residual);
        v.max_orth_residual = std::max(v.max_orth_residual, r.orth_residual);
        v.max_w_residual = std::max(v.max_w_residual, r.w_residual);
    }
    bool up = true, down = true;
    for (std::size_t i = 1; i < records.size(); ++i) {
        up &= records[i].E > records[i - 1].E;
        down &= records[i].E < records[i - 1].E;
    }

    if (sign_class == SignClass::Indefinite) {
        v.status = Status::NotApplicable;
        v.message = "dV/da changes sign; the monotonicity theorem makes no claim";
        return v;
    }
    double worst = 0.0;
    if (sign_class == SignClass::NonNegative) {
        worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : records) worst = std::max(worst, -r.dE_hf);
        v.strictly_monotone = up;
    } else {
        worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : records) worst = std::max(worst, r.dE_hf);
        v.strictly_monotone = down;
    }
    v.status = worst <= tol.sign ? Status::Pass : Status::Fail;
    v.message = std::string(v.status == Status::Pass ? "E'(a) has the sign of dV/da" : "E'(a) violates the sign of dV/da") +
                " (hypothesis " + std::string(to_string(sign_class)) + ", observed " +
                std::string(to_string(v.conclusion)) + (v.strictly_monotone ? ", strictly monotone" : "") + ")";
    return v;
}

CheckResult check_hf(const std::vector<SweepRecord>& records, const Tolerances& tol) {
    CheckResult c{"hf", Status::Pass, 0.0, {}};
    for (const auto& r : records) {
        const double allowed = std::max(tol.hf_rel * std::abs(r.dE_hf), tol.hf_abs);
        c.worst = std::max(c.worst, r.hf_residual / allowed);
        if (r.hf_residual > allowed) c.status = Status::Fail;
    }
    c.message = "max |dE_fd - dE_hf| / allowed = " + fmt(c.worst);
    return c;
}

CheckResult check_orth(const std::vector<SweepRecord>& records, const Tolerances& tol) {
    CheckResult c{"orth", Status::Pass, 0.0, {}};
    for (const auto& r : records) c.worst = std::max(c.worst, r.orth_residual);
    if (c.worst > tol.orth) c.status = Status::Fail;
    c.message = "max orthogonality residual " + fmt(c.worst) + " (tolerance " + fmt(tol.orth) + ")";
    return c;
}

CheckResult check_w(const std::vector<SweepRecord>& records, const Tolerances& tol) {
    CheckResult c{"w", Status::Pass, 0.0, {}};
    for (const auto& r : records) c.worst = std::max(c.worst, r.w_residual);
    if (c.worst > tol.w) c.status = Status::Fail;
    c.message = "max |W| " + fmt(c.worst) + " (tolerance " + fmt(tol.w) + ")";
    return c;
}

CheckResult check_monotone(const std::vector<SweepRecord>& records, SignClass sign_class, const Tolerances& tol) {
    const auto v = verdict(records, sign_class, tol);
    return {"monotone", v.status, 0.0, v.message};
}

double ordering_radius(const PotentialFamily& v1, const PotentialFamily& v2) {
    return 1e3 * std::max(v1.length_scale(), v2.length_scale());
}

Comparison compare_potentials(const PotentialFamily& v1, const PotentialFamily& v2, const ChannelSpec& channel,
                              int n_r, const HarnessOptions& options, int path_points) {
    const auto path_family = make_homotopy(v1, v2);
    const auto order = classify_sign(path_family, ordering_radius(v1, v2));
    if (order != SignClass::NonNegative)
        throw PreconditionError("potentials are not pointwise ordered (V2 - V1 is " + std::string(to_string(order)) +
                                "); the comparison does not apply");

    Comparison c;
    c.E1 = solve(channel, v1, n_r, options.solve).E;
    c.E2 = solve(channel, v2, n_r, options.solve).E;
    c.ordered = c.E1 <= c.E2 + 2.0 * options.solve.e_tol;
    c.path = sweep(path_family, channel, n_r, linear_grid(0.0, 1.0, std::max(2, path_points)), options);
    c.verdict = verdict(c.path, order);
    c.verdict.check = "compare";
    if (!c.ordered) {
        c.verdict.status = Status::Fail;
        c.verdict.message = "E1 > E2 although V1 <= V2";
    }
    return c;
}

} // namespace dirac::harness
