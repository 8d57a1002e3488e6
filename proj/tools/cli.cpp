#include "cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dirac/errors.hpp"
#include "dirac/harness.hpp"
#include "dirac/oracle.hpp"
#include "dirac/potentials.hpp"
#include "dirac/solver.hpp"
#include "io.hpp"

namespace dirac::cli {

namespace {

using harness::Status;

struct RunConfig {
    // family
    std::string family;
    std::optional<double> alpha, a, b;
    std::optional<std::string> shape, active;
    std::string family2;

    // channel
    int d = 3;
    std::optional<int> tau;
    std::optional<double> j;
    std::optional<std::string> parity;
    int n_r = 0;

    // sweep grid
    std::optional<double> from, to;
    int steps = 11;
    std::string scale = "linear";
    std::optional<double> step;
    int workers = 1;
    int path_points = 5;

    // numeric overrides
    SolveConfig solve;

    // output
    std::string output;
    std::string format = "csv";
    std::string dump;

    // verify
    std::string checks = "hf,orth,w,monotone";
    harness::Tolerances tol;

    // oracle
    std::vector<int> oracle_n;
    std::vector<double> oracle_j, oracle_alpha;
};

void add_options(CLI::App& app, RunConfig& c) {
    app.add_option("--family", c.family, "family name or full spec, e.g. \"cutoff-coulomb alpha=1 a=0.1 active=a\"");
    app.add_option("--alpha", c.alpha, "Coulomb strength alpha");
    app.add_option("--a", c.a, "parameter a");
    app.add_option("--b", c.b, "length parameter b of the coupling family");
    app.add_option("--shape", c.shape, "coupling shape: exp | inv | yukawa | mixed");
    app.add_option("--active", c.active, "active parameter for derivatives and sweeps");
    app.add_option("--family2", c.family2, "second family spec (compare)");

    app.add_option("--d", c.d, "spatial dimension")->capture_default_str();
    app.add_option("--tau", c.tau, "tau = +1 or -1 (d > 1, default -1)");
    app.add_option("--j", c.j, "total angular momentum j (d > 1, default 1/2)");
    app.add_option("--parity", c.parity, "even | odd (d = 1 only)");
    app.add_option("--nr", c.n_r, "node count of psi1")->capture_default_str();

    app.add_option("--from", c.from, "sweep start");
    app.add_option("--to", c.to, "sweep end");
    app.add_option("--steps", c.steps, "number of sweep points")->capture_default_str();
    app.add_option("--scale", c.scale, "sweep spacing: linear | log")->capture_default_str();
    app.add_option("--step", c.step, "finite-difference step (default max(1e-4, 1e-3|a|))");
    app.add_option("--workers", c.workers, "sweep worker threads")->capture_default_str();
    app.add_option("--path-points", c.path_points, "homotopy points for compare")->capture_default_str();

    app.add_option("--r-max", c.solve.r_max, "outer radius");
    app.add_option("--n-grid", c.solve.n_grid, "output grid size")->capture_default_str();
    app.add_option("--r0", c.solve.r0, "first grid radius (d > 1)");
    app.add_option("--origin-scale", c.solve.origin_scale, "shifted-log grid scale (d = 1)");
    app.add_option("--e-tol", c.solve.e_tol, "eigenvalue bisection tolerance")->capture_default_str();
    app.add_option("--ode-rtol", c.solve.ode_rel_tol, "integrator relative tolerance")->capture_default_str();
    app.add_option("--ode-atol", c.solve.ode_abs_tol, "integrator absolute tolerance")->capture_default_str();
    app.add_option("--scan-points", c.solve.scan_points, "energy scan samples")->capture_default_str();
    app.add_option("--match-scale", c.solve.match_scale, "multiplier on the matching radius")->capture_default_str();
    app.add_option("--r-match", c.solve.r_match, "fixed matching radius");

    app.add_option("--output,-o", c.output, "output file (default stdout)");
    app.add_option("--format", c.format, "csv | json")->capture_default_str();
    app.add_option("--dump", c.dump, "write r,psi1,psi2 of the solved state to this file");

    app.add_option("--checks", c.checks, "comma-separated subset of hf,orth,w,monotone")->capture_default_str();
    app.add_option("--hf-rtol", c.tol.hf_rel, "HF relative tolerance")->capture_default_str();
    app.add_option("--hf-atol", c.tol.hf_abs, "HF absolute tolerance")->capture_default_str();
    app.add_option("--orth-tol", c.tol.orth, "orthogonality tolerance")->capture_default_str();
    app.add_option("--w-tol", c.tol.w, "W tolerance")->capture_default_str();
    app.add_option("--sign-tol", c.tol.sign, "sign slack for monotonicity")->capture_default_str();
}

std::map<std::string, double> with_overrides(std::map<std::string, double> params, const RunConfig& c) {
    if (c.alpha) params["alpha"] = *c.alpha;
    if (c.a) params["a"] = *c.a;
    if (c.b) params["b"] = *c.b;
    return params;
}

PotentialFamily build_family(const std::string& spec, const RunConfig& c, bool overrides) {
    if (spec.empty()) throw ConfigError("--family is required");
    const bool full = spec.find_first_of(" =") != std::string::npos;
    if (!overrides) return PotentialFamily::parse(spec);

    std::string name = spec;
    std::map<std::string, double> params;
    std::string active;
    std::optional<Shape> shape;
    if (full) {
        const auto parsed = PotentialFamily::parse(spec);
        name = parsed.name();
        params = parsed.params();
        active = parsed.active_param();
        shape = parsed.shape();
    }
    params = with_overrides(std::move(params), c);
    if (c.active) active = *c.active;
    if (c.shape) shape = parse_shape(*c.shape);
    return PotentialFamily::make(name, params, active, shape);
}

ChannelSpec build_channel(const RunConfig& c) {
    ChannelSpec ch;
    ch.d = c.d;
    if (c.d == 1) {
        ch.tau = c.tau;
        ch.j = c.j;
        if (c.parity) {
            if (*c.parity == "even") ch.parity = Parity::Even;
            else if (*c.parity == "odd") ch.parity = Parity::Odd;
            else throw ConfigError("parity must be even or odd");
        }
    } else {
        if (c.parity) throw ConfigError("--parity is only valid with --d 1");
        ch.tau = c.tau.value_or(-1);
        ch.j = c.j.value_or(0.5);
    }
    ch.validate();
    return ch;
}

harness::HarnessOptions harness_options(const RunConfig& c) {
    harness::HarnessOptions o;
    o.solve = c.solve;
    o.step = c.step;
    o.workers = c.workers;
    if (c.workers < 1) throw ConfigError("--workers must be >= 1");
    if (c.step && !(*c.step > 0.0)) throw ConfigError("--step must be positive");
    return o;
}

std::vector<double> sweep_grid(const RunConfig& c) {
    if (!c.from || !c.to) throw ConfigError("sweep requires --from and --to");
    if (c.scale == "linear") return harness::linear_grid(*c.from, *c.to, c.steps);
    if (c.scale == "log") return harness::log_grid(*c.from, *c.to, c.steps);
    throw ConfigError("--scale must be linear or log");
}

void check_format(const RunConfig& c) {
    if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
}

// Writes to --output when given, otherwise to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) : out_(&out) {
        if (!path.empty()) {
            file_.open(path, std::ios::out | std::ios::trunc);
            if (!file_) throw ConfigError("cannot open output file '" + path + "'");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

nlohmann::json sweep_json(const PotentialFamily& f, const ChannelSpec& ch, int n_r,
                          const std::vector<harness::SweepRecord>& records) {
    return {{"family", f.describe()}, {"channel", io::channel_json(ch)}, {"n_r", n_r}, {"records", records}};
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
    check_format(c);
    const auto family = build_family(c.family, c, true);
    const auto channel = build_channel(c);
    const auto state = solve(channel, family, c.n_r, c.solve);
    Sink sink(c.output, out);
    if (c.format == "json") {
        sink.stream() << io::state_json(state).dump(2) << '\n';
    } else {
        auto& os = sink.stream();
        os << "family = " << family.describe() << '\n'
           << "E = " << io::num(state.E) << '\n'
           << "nodes = " << state.nodes << '\n'
           << "nodes_psi2 = " << state.nodes_psi2 << '\n'
           << "norm_residual = " << io::num(state.norm_residual) << '\n'
           << "match_residual = " << io::num(state.match_residual) << '\n'
           << "r_match = " << io::num(state.r_match) << '\n';
    }
    if (!c.dump.empty()) {
        std::ofstream dump(c.dump);
        if (!dump) throw ConfigError("cannot open dump file '" + c.dump + "'");
        io::write_wavefunction_csv(dump, state);
    }
    return kOk;
}

void emit_sweep(const RunConfig& c, std::ostream& os, const PotentialFamily& f, const ChannelSpec& ch,
                const std::vector<harness::SweepRecord>& records, const std::string& aborted) {
    if (c.format == "json") {
        auto j = sweep_json(f, ch, c.n_r, records);
        if (!aborted.empty()) j["aborted"] = aborted;
        os << j.dump(2) << '\n';
    } else {
        io::write_sweep_csv(os, records);
        if (!aborted.empty()) os << "# ABORTED: " << aborted << '\n';
    }
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    check_format(c);
    const auto family = build_family(c.family, c, true);
    const auto channel = build_channel(c);
    const auto grid = sweep_grid(c);
    const auto opts = harness_options(c);
    Sink sink(c.output, out);
    try {
        const auto records = harness::sweep(family, channel, c.n_r, grid, opts);
        emit_sweep(c, sink.stream(), family, channel, records, {});
    } catch (const harness::SweepAborted& e) {
        emit_sweep(c, sink.stream(), family, channel, e.partial, e.what());
        err << "error: " << e.what() << '\n';
        return kSweepAborted;
    }
    return kOk;
}

std::set<std::string> parse_checks(const std::string& list) {
    static const std::set<std::string> known = {"hf", "orth", "w", "monotone"};
    std::set<std::string> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        if (!known.count(item)) throw ConfigError("unknown check '" + item + "'");
        out.insert(item);
    }
    if (out.empty()) throw ConfigError("--checks selects nothing");
    return out;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    check_format(c);
    const auto checks = parse_checks(c.checks);
    const auto family = build_family(c.family, c, true);
    const auto channel = build_channel(c);
    const auto grid = sweep_grid(c);
    const auto opts = harness_options(c);
    const auto hypothesis = classify_sign(family, harness::ordering_radius(family, family));

    std::vector<harness::SweepRecord> records;
    try {
        records = harness::sweep(family, channel, c.n_r, grid, opts);
    } catch (const harness::SweepAborted& e) {
        err << "error: " << e.what() << '\n';
        return kSweepAborted;
    }

    std::vector<harness::CheckResult> results;
    if (checks.count("hf")) results.push_back(harness::check_hf(records, c.tol));
    if (checks.count("orth")) results.push_back(harness::check_orth(records, c.tol));
    if (checks.count("w")) results.push_back(harness::check_w(records, c.tol));
    auto v = harness::verdict(records, hypothesis, c.tol);
    if (checks.count("monotone")) results.push_back({"monotone", v.status, 0.0, v.message});

    bool failed = false;
    for (const auto& r : results) failed |= r.status == Status::Fail;

    Sink sink(c.output, out);
    auto& os = sink.stream();
    if (c.format == "json") {
        nlohmann::json j{{"family", family.describe()},
                         {"channel", io::channel_json(channel)},
                         {"n_r", c.n_r},
                         {"verdict", v},
                         {"checks", results},
                         {"status", failed ? "fail" : "pass"}};
        os << j.dump(2) << '\n';
    } else {
        os << "family: " << family.describe() << '\n';
        os << "sweep: " << records.size() << " points, " << family.active_param() << " in [" << io::num(grid.front())
           << ", " << io::num(grid.back()) << "], nodes " << c.n_r << '\n';
        for (const auto& r : results)
            os << r.check << ": " << harness::to_string(r.status) << " (" << r.message << ")\n";
        os << "result: " << (failed ? "fail" : "pass") << '\n';
    }
    return failed ? kVerifyFailed : kOk;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
    check_format(c);
    if (c.family2.empty()) throw ConfigError("compare requires --family2");
    const auto v1 = build_family(c.family, c, true);
    const auto v2 = build_family(c.family2, c, false);
    const auto channel = build_channel(c);
    const auto cmp = harness::compare_potentials(v1, v2, channel, c.n_r, harness_options(c), c.path_points);

    Sink sink(c.output, out);
    auto& os = sink.stream();
    if (c.format == "json") {
        nlohmann::json j{{"family1", v1.describe()}, {"family2", v2.describe()}, {"channel", io::channel_json(channel)},
                         {"n_r", c.n_r},            {"E1", cmp.E1},              {"E2", cmp.E2},
                         {"ordered", cmp.ordered},  {"path", cmp.path},          {"verdict", cmp.verdict}};
        os << j.dump(2) << '\n';
    } else {
        os << "V1: " << v1.describe() << '\n'
           << "V2: " << v2.describe() << '\n'
           << "E1 = " << io::num(cmp.E1) << '\n'
           << "E2 = " << io::num(cmp.E2) << '\n'
           << "E1 <= E2: " << (cmp.ordered ? "yes" : "no") << '\n'
           << "verdict: " << harness::to_string(cmp.verdict.status) << " (" << cmp.verdict.message << ")\n";
    }
    return cmp.verdict.status == Status::Fail ? kVerifyFailed : kOk;
}

template <class T>
T pick(const std::vector<T>& v, std::size_t i) {
    return v.size() == 1 ? v.front() : v[i];
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
    check_format(c);
    const auto& ns = c.oracle_n;
    const auto& js = c.oracle_j;
    const auto& as = c.oracle_alpha;
    if (ns.empty() || js.empty() || as.empty()) throw ConfigError("oracle requires --n, --j and --alpha");
    const std::size_t rows = std::max({ns.size(), js.size(), as.size()});
    for (std::size_t s : {ns.size(), js.size(), as.size()})
        if (s != 1 && s != rows) throw ConfigError("--n, --j and --alpha lists must have equal length or length 1");

    std::vector<io::OracleRow> table;
    for (std::size_t i = 0; i < rows; ++i) {
        const oracle::CoulombLevel lv{pick(ns, i), pick(js, i), pick(as, i)};
        table.push_back({lv, oracle::coulomb_energy(lv), oracle::coulomb_energy_derivative(lv)});
    }
    Sink sink(c.output, out);
    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : table)
            arr.push_back({{"n", r.level.n}, {"j", r.level.j}, {"alpha", r.level.alpha}, {"E", r.E},
                           {"dE_dalpha", r.dE_dalpha}});
        sink.stream() << arr.dump(2) << '\n';
    } else {
        io::write_oracle_csv(sink.stream(), table);
    }
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Radial Dirac bound states and monotonicity checks"};
    app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    add_options(app, c);

    auto* solve_cmd = app.add_subcommand("solve", "solve one bound state");
    auto* sweep_cmd = app.add_subcommand("sweep", "E(a) sweep with derivative residuals");
    auto* verify_cmd = app.add_subcommand("verify", "sweep plus pass/fail checks");
    auto* compare_cmd = app.add_subcommand("compare", "compare two pointwise-ordered potentials");
    auto* oracle_cmd = app.add_subcommand("oracle", "exact Dirac-Coulomb energies");
    for (auto* sub : {solve_cmd, sweep_cmd, verify_cmd, compare_cmd, oracle_cmd}) sub->fallthrough();
    oracle_cmd->add_option("--n", c.oracle_n, "principal quantum numbers");
    oracle_cmd->add_option("--j", c.oracle_j, "total angular momenta");
    oracle_cmd->add_option("--alpha", c.oracle_alpha, "coupling strengths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfig;
    }

    try {
        c.solve.validate();
        if (solve_cmd->parsed()) return cmd_solve(c, out);
        if (sweep_cmd->parsed()) return cmd_sweep(c, out, err);
        if (verify_cmd->parsed()) return cmd_verify(c, out, err);
        if (compare_cmd->parsed()) return cmd_compare(c, out);
        if (oracle_cmd->parsed()) return cmd_oracle(c, out);
        return kConfig;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kConfig;
    } catch (const UnsupportedRegime& e) {
        err << "unsupported regime: " << e.what() << '\n';
        return kConfig;
    } catch (const NoSuchState& e) {
        err << "no such state: " << e.what() << '\n';
        return kNoSuchState;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        return kPrecondition;
    } catch (const harness::SweepAborted& e) {
        err << "error: " << e.what() << '\n';
        return kSweepAborted;
    } catch (const Error& e) {
        // NumericalError, LevelCrossing, ContractViolation
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
}

} // namespace dirac::cli
