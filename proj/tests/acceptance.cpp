// Acceptance suite: one line per criterion, exit status 1 if any fails.
//
//   acceptance            run every criterion
//   acceptance 2 5        run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dirac/errors.hpp"
#include "dirac/harness.hpp"
#include "dirac/oracle.hpp"
#include "dirac/solver.hpp"

using namespace dirac;
using namespace dirac::harness;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

const ChannelSpec s_half = ChannelSpec::radial(3, -1, 0.5);

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

bool hf_ok(const SweepRecord& r) { return r.hf_residual <= std::max(1e-5 * std::abs(r.dE_hf), 1e-7); }

double hf_ratio(const SweepRecord& r) { return r.hf_residual / std::max(1e-5 * std::abs(r.dE_hf), 1e-7); }

// Sweeps shared between criteria.
std::vector<SweepRecord>& cutoff_sweep(int n_r) {
    static std::vector<SweepRecord> cache[2];
    auto& c = cache[n_r];
    if (c.empty())
        c = sweep(PotentialFamily::cutoff_coulomb(1.0, 0.1, "a"), s_half, n_r, linear_grid(0.1, 2.0, 20));
    return c;
}

Outcome oracle_equivalence() {
    Outcome o;
    double worst = 0.0;
    int count = 0;
    for (double alpha : {0.2, 0.5, 0.9})
        for (double j : {0.5, 1.5})
            for (int n_r : {0, 1, 2}) {
                const oracle::CoulombLevel lv{static_cast<int>(std::lround(n_r + j + 0.5)), j, alpha};
                const auto s = solve(ChannelSpec::radial(3, -1, j), PotentialFamily::pure_coulomb(alpha), n_r);
                const double err = std::abs(s.E - oracle::coulomb_energy(lv));
                worst = std::max(worst, err);
                o.pass &= err <= 1e-6 && s.nodes == n_r;
                ++count;
            }
    o.detail = std::to_string(count) + " levels, max |E - E_exact| = " + sci(worst) + " (tol 1e-6)";
    return o;
}

Outcome hellmann_feynman() {
    Outcome o;
    double worst = 0.0;
    for (int n_r : {0, 1})
        for (const auto& r : cutoff_sweep(n_r)) {
            o.pass &= hf_ok(r);
            worst = std::max(worst, hf_ratio(r));
        }
    o.detail = "cutoff-Coulomb a in [0.1, 2], 20 points, n_r 0..1: max residual/allowed = " + sci(worst);
    return o;
}

Outcome theorem_verdicts() {
    Outcome o;
    const auto fa = PotentialFamily::cutoff_coulomb(1.0, 0.1, "a");
    const auto fal = PotentialFamily::cutoff_coulomb(0.2, 1.0, "alpha");
    const double r_sign = 1e3;
    int verdicts = 0;
    o.pass &= classify_sign(fa, r_sign) == SignClass::NonNegative;
    o.pass &= classify_sign(fal, r_sign) == SignClass::NonPositive;
    for (int n_r : {0, 1}) {
        const auto v = verdict(cutoff_sweep(n_r), SignClass::NonNegative);
        o.pass &= v.status == Status::Pass;
        ++verdicts;
    }
    for (int n_r : {0, 1, 2}) {
        const auto recs = sweep(fal, s_half, n_r, linear_grid(0.2, 2.0, 8));
        const auto v = verdict(recs, SignClass::NonPositive);
        o.pass &= v.status == Status::Pass;
        ++verdicts;
    }
    double worst = 0.0;
    for (double alpha : {0.2, 0.5, 0.9})
        for (int n_r : {0, 1}) {
            const auto f = PotentialFamily::pure_coulomb(alpha);
            const double hf = hf_derivative(solve(s_half, f, n_r), f);
            const double exact = oracle::coulomb_energy_derivative({n_r + 1, 0.5, alpha});
            const double rel = std::abs(hf - exact) / std::abs(exact);
            worst = std::max(worst, rel);
            o.pass &= rel <= 1e-5;
        }
    o.detail = std::to_string(verdicts) + " cutoff verdicts (a up, alpha down); pure-Coulomb dE/dalpha max rel err " +
               sci(worst) + " (tol 1e-5)";
    return o;
}

Outcome orthogonality() {
    Outcome o;
    double worst = 0.0;
    for (int n_r : {0, 1})
        for (const auto& r : cutoff_sweep(n_r)) worst = std::max(worst, r.orth_residual);
    o.pass &= worst <= 1e-5;

    const auto f = PotentialFamily::cutoff_coulomb(1.0, 1.0, "a");
    double min_order = 1e9;
    for (int n_r : {0, 1}) {
        double prev = 0.0;
        for (double h : {0.1, 0.05, 0.025, 0.0125}) {
            const auto st = compute_stencil(f, s_half, n_r, 1.0, h, {});
            const double res = orthogonality_residual(st.center, wavefunction_param_derivative(st));
            if (prev > 0.0) min_order = std::min(min_order, std::log2(prev / res));
            prev = res;
        }
    }
    o.pass &= min_order >= 1.8;
    o.detail = "max residual at default h " + sci(worst) + " (tol 1e-5); min observed order " +
               std::to_string(min_order).substr(0, 4) + " (need 1.8)";
    return o;
}

Outcome w_identity() {
    Outcome o;
    double worst = 0.0;
    const auto f = PotentialFamily::cutoff_coulomb(1.0, 1.0, "a");
    for (int n_r : {0, 1}) {
        const auto st = compute_stencil(f, s_half, n_r, 1.0, default_step(1.0), {});
        const double w = w_residual(st.center, wavefunction_param_derivative(st), f);
        worst = std::max(worst, w);
        for (const auto& r : cutoff_sweep(n_r)) worst = std::max(worst, r.w_residual);
    }
    o.pass &= worst <= 1e-4;

    // coarse grids make the discretization error visible; refine grid and h together
    std::string trail;
    for (int n_r : {0, 1}) {
        double prev = INFINITY;
        for (auto [n, h] : {std::pair{200, 4e-3}, {400, 2e-3}, {800, 1e-3}}) {
            SolveConfig c;
            c.n_grid = n;
            const auto st = compute_stencil(f, s_half, n_r, 1.0, h, c);
            const double w = w_residual(st.center, wavefunction_param_derivative(st), f);
            o.pass &= w < prev;
            prev = w;
            if (n_r == 0) trail += (trail.empty() ? "" : " > ") + sci(w);
        }
    }
    o.detail = "max |W| at defaults " + sci(worst) + " (tol 1e-4); ground state under refinement " + trail;
    return o;
}

Outcome comparison() {
    Outcome o;
    const auto v1 = PotentialFamily::cutoff_coulomb(1.0, 0.5);
    const auto v2 = PotentialFamily::cutoff_coulomb(1.0, 1.0);
    std::string energies;
    for (int n_r : {0, 1}) {
        const auto c = compare_potentials(v1, v2, s_half, n_r, {}, 11);
        o.pass &= c.E1 <= c.E2;
        o.pass &= c.verdict.status == Status::Pass;
        for (std::size_t i = 0; i < c.path.size(); ++i) {
            o.pass &= c.path[i].dE_hf >= -1e-8;
            if (i > 0) o.pass &= c.path[i].E >= c.path[i - 1].E;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%sn_r=%d: %.10f <= %.10f", energies.empty() ? "" : ", ", n_r, c.E1, c.E2);
        energies += buf;
    }
    o.detail = energies + "; homotopy path nondecreasing at 11 points";
    return o;
}

Outcome line_sector() {
    Outcome o;
    const auto f = PotentialFamily::cutoff_coulomb(1.0, 0.5, "a");
    std::string energies;
    double worst = 0.0;
    for (Parity p : {Parity::Even, Parity::Odd}) {
        const auto ch = ChannelSpec::line(p);
        const auto recs = sweep(f, ch, 0, linear_grid(0.5, 2.0, 8));
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = recs[i];
            o.pass &= r.E > -1.0 && r.E < 1.0;
            o.pass &= hf_ok(r);
            worst = std::max(worst, hf_ratio(r));
            if (i > 0) o.pass &= r.E > recs[i - 1].E;
        }
        o.pass &= verdict(recs, SignClass::NonNegative).status == Status::Pass;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%s E(0.5)=%.6f", energies.empty() ? "" : ", ",
                      std::string(to_string(p)).c_str(), recs.front().E);
        energies += buf;
    }
    o.detail = energies + "; HF max residual/allowed " + sci(worst) + "; E increasing in a";
    return o;
}

Outcome robustness() {
    Outcome o;
    const auto f = PotentialFamily::cutoff_coulomb(1.0, 0.1, "a");
    const auto grid = linear_grid(0.1, 2.0, 5);
    const SolveConfig base;

    std::vector<std::pair<std::string, SolveConfig>> variants;
    auto add = [&](std::string name, auto edit) {
        SolveConfig c = base;
        edit(c);
        variants.emplace_back(std::move(name), c);
    };
    add("r_match -20%", [](SolveConfig& c) { c.match_scale = 0.8; });
    add("r_match +20%", [](SolveConfig& c) { c.match_scale = 1.2; });
    add("grid x2", [](SolveConfig& c) { c.n_grid *= 2; });
    add("ode tol /10", [](SolveConfig& c) {
        c.ode_rel_tol /= 10;
        c.ode_abs_tol /= 10;
    });

    auto statuses = [](const std::vector<SweepRecord>& recs) {
        const Tolerances tol;
        return std::vector<Status>{check_hf(recs, tol).status, check_orth(recs, tol).status,
                                   check_w(recs, tol).status, verdict(recs, SignClass::NonNegative).status};
    };

    // plain solves at the default tolerances
    double worst_solve = 0.0;
    for (int n_r : {0, 1})
        for (double a : grid) {
            const auto fam = f.with_param("a", a);
            const double e0 = solve(s_half, fam, n_r, base).E;
            for (const auto& [name, cfg] : variants) {
                const double dE = std::abs(solve(s_half, fam, n_r, cfg).E - e0);
                worst_solve = std::max(worst_solve, dE);
                if (dE > 10 * base.e_tol) {
                    o.pass = false;
                    o.detail += name + " moved E by " + sci(dE) + " at a=" + std::to_string(a) + "; ";
                }
            }
        }

    double worst = 0.0;
    for (int n_r : {0, 1}) {
        HarnessOptions ref_opts;
        ref_opts.solve = base;
        const auto ref = sweep(f, s_half, n_r, grid, ref_opts);
        const auto ref_status = statuses(ref);
        for (const auto& [name, cfg] : variants) {
            HarnessOptions opts;
            opts.solve = cfg;
            const auto recs = sweep(f, s_half, n_r, grid, opts);
            if (statuses(recs) != ref_status) {
                o.pass = false;
                o.detail += "verdict changed under " + name + "; ";
            }
            for (std::size_t i = 0; i < recs.size(); ++i) {
                const double dE = std::abs(recs[i].E - ref[i].E);
                worst = std::max(worst, dE);
                if (dE > 10 * base.e_tol) {
                    o.pass = false;
                    o.detail += name + " moved E by " + sci(dE) + " at a=" + std::to_string(recs[i].a) + "; ";
                }
            }
        }
    }
    o.detail += "4 perturbations x 2 states x 5 points: verdicts " +
                std::string(o.pass ? "unchanged" : "checked") + ", max |dE| default solves " + sci(worst_solve) +
                ", sweeps " + sci(worst) + " (tol " +
                sci(10 * base.e_tol) + ")";
    return o;
}

Outcome antisymmetry() {
    Outcome o;
    std::vector<std::pair<ChannelSpec, PotentialFamily>> cases;
    for (double alpha : {0.2, 0.5, 0.9})
        for (double j : {0.5, 1.5}) cases.emplace_back(ChannelSpec::radial(3, -1, j), PotentialFamily::pure_coulomb(alpha));
    for (double a : {0.1, 0.5, 1.0, 2.0}) {
        cases.emplace_back(s_half, PotentialFamily::cutoff_coulomb(1.0, a));
        cases.emplace_back(ChannelSpec::radial(3, 1, 0.5), PotentialFamily::cutoff_coulomb(1.0, a));
        cases.emplace_back(ChannelSpec::line(Parity::Even), PotentialFamily::cutoff_coulomb(1.0, a));
        cases.emplace_back(ChannelSpec::line(Parity::Odd), PotentialFamily::cutoff_coulomb(1.0, a));
    }
    cases.emplace_back(ChannelSpec::radial(2, -1, 0.5), PotentialFamily::coupling(Shape::Exponential, 2.0));
    cases.emplace_back(ChannelSpec::radial(4, -1, 0.5), PotentialFamily::coupling(Shape::Inverse, 1.5));

    double worst = 0.0;
    int states = 0;
    for (const auto& [ch, fam] : cases) {
        for (int n_r : {0, 1, 2}) {
            BoundState s = [&] {
                try {
                    return solve(ch, fam, n_r);
                } catch (const NoSuchState&) {
                    return BoundState{ch, fam};
                }
            }();
            if (s.grid.size() == 0) continue;
            const double res = antisymmetry_residual(s);
            worst = std::max(worst, res);
            o.pass &= res <= 1e-6;
            ++states;
        }
    }
    o.detail = std::to_string(states) + " states, max |(psi1, D psi2) + (D psi1, psi2)| = " + sci(worst) +
               " (tol 1e-6)";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "Dirac-Coulomb oracle equivalence", oracle_equivalence},
        {2, "Hellmann-Feynman identity", hellmann_feynman},
        {3, "monotonicity verdicts", theorem_verdicts},
        {4, "orthogonality relation", orthogonality},
        {5, "W identity", w_identity},
        {6, "comparison corollary", comparison},
        {7, "one-dimensional parity sectors", line_sector},
        {8, "numerical robustness", robustness},
        {9, "discrete anti-symmetry", antisymmetry},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %d  %-34s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
