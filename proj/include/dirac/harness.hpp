#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirac/errors.hpp"
#include "dirac/potentials.hpp"
#include "dirac/solver.hpp"

namespace dirac::harness {

/// One point of an E(a) sweep.
struct SweepRecord {
    double a = 0.0;
    double E = 0.0;
    double dE_fd = 0.0; // Richardson-extrapolated central difference of E(a)
    double dE_hf = 0.0; // (psi1, V_a psi1) + (psi2, V_a psi2)
    double hf_residual = 0.0;
    double orth_residual = 0.0;
    double w_residual = 0.0;
    int nodes = 0;

    bool operator==(const SweepRecord&) const = default;
};

struct Tolerances {
    double hf_rel = 1e-5;
    double hf_abs = 1e-7;
    double orth = 1e-5;
    double w = 1e-4;
    double sign = 1e-8;
};

struct HarnessOptions {
    SolveConfig solve;
    /// Parameter step for finite differences; default max(1e-4, 1e-3 |a|).
    std::optional<double> step;
    /// Sweep worker threads; results are assembled in grid order regardless.
    int workers = 1;
};

double default_step(double a);

/// Tightened copy of `base` used for every solve inside a finite-difference
/// stencil, so that E(a) is smooth well below the step size.
SolveConfig derivative_config(const SolveConfig& base);

/// Same config with the output grid fixed to that of `state`.
SolveConfig pinned_config(const SolveConfig& base, const BoundState& state);

/// Hellmann-Feynman value of E'(a) for a solved state.
double hf_derivative(const BoundState& state, const PotentialFamily& family);

/// Central state plus neighbours at a +- h (full states, same grid) and a +- h/2 (energies).
struct Stencil {
    double a = 0.0, h = 0.0;
    BoundState center, minus, plus;
    double E_minus_half = 0.0, E_plus_half = 0.0;
};

Stencil compute_stencil(const PotentialFamily& family, const ChannelSpec& channel, int n_r, double a, double h,
                        const SolveConfig& config);

/// Richardson combination of the central differences with steps h and h/2.
double fd_derivative(const Stencil& s);
double fd_derivative(const PotentialFamily& family, const ChannelSpec& channel, int n_r, double a,
                     std::optional<double> h = std::nullopt, const SolveConfig& config = {});

struct ParamDerivative {
    std::vector<double> psi1a, psi2a;
};

ParamDerivative wavefunction_param_derivative(const Stencil& s);
ParamDerivative wavefunction_param_derivative(const PotentialFamily& family, const ChannelSpec& channel, int n_r,
                                              double a, std::optional<double> h = std::nullopt,
                                              const SolveConfig& config = {});

/// |(psi1a, psi1) + (psi2a, psi2)|.
double orthogonality_residual(const BoundState& state, const ParamDerivative& pd);

/// |W| with W assembled term by term from discrete derivatives and inner products.
double w_residual(const BoundState& state, const ParamDerivative& pd, const PotentialFamily& family);

SweepRecord sweep_point(const PotentialFamily& family, const ChannelSpec& channel, int n_r, double a,
                        const HarnessOptions& options = {});

/// Raised when a sweep point fails; carries the records computed before it.
class SweepAborted : public Error {
public:
    SweepAborted(const std::string& what, std::vector<SweepRecord> partial, std::exception_ptr cause)
        : Error(what), partial(std::move(partial)), cause(std::move(cause)) {}
    std::vector<SweepRecord> partial;
    std::exception_ptr cause;
};

std::vector<SweepRecord> sweep(const PotentialFamily& family, const ChannelSpec& channel, int n_r,
                               const std::vector<double>& a_grid, const HarnessOptions& options = {});

std::vector<double> linear_grid(double from, double to, int steps);
std::vector<double> log_grid(double from, double to, int steps);

enum class Status { Pass, Fail, NotApplicable };

std::string_view to_string(Status s);

/// Outcome of one named check over a sweep.
struct CheckResult {
    std::string check;
    Status status = Status::Fail;
    double worst = 0.0;
    std::string message;
};

/// Theorem verdict: hypothesis (sign of V_a) against the observed sign of E'(a).
struct Verdict {
    std::string check = "monotone";
    SignClass hypothesis = SignClass::Indefinite;
    SignClass conclusion = SignClass::Indefinite;
    bool strictly_monotone = false; // observation only
    double max_hf_residual = 0.0;
    double max_orth_residual = 0.0;
    double max_w_residual = 0.0;
    Status status = Status::Fail;
    Tolerances tolerances;
    std::string message;
};

/// Sign pattern of dE_hf over the sweep, with `tol` slack.
SignClass observed_sign(const std::vector<SweepRecord>& records, double tol);

Verdict verdict(const std::vector<SweepRecord>& records, SignClass sign_class, const Tolerances& tol = {});

CheckResult check_hf(const std::vector<SweepRecord>& records, const Tolerances& tol);
CheckResult check_orth(const std::vector<SweepRecord>& records, const Tolerances& tol);
CheckResult check_w(const std::vector<SweepRecord>& records, const Tolerances& tol);
CheckResult check_monotone(const std::vector<SweepRecord>& records, SignClass sign_class, const Tolerances& tol);

struct Comparison {
    double E1 = 0.0, E2 = 0.0;
    bool ordered = false;
    std::vector<SweepRecord> path; // homotopy sweep over t in [0, 1]
    Verdict verdict;
};

/// Radius used to test pointwise ordering of V1 and V2.
double ordering_radius(const PotentialFamily& v1, const PotentialFamily& v2);

/// Solve both endpoints and the homotopy path between them. Raises
/// PreconditionError unless V1 <= V2 pointwise.
Comparison compare_potentials(const PotentialFamily& v1, const PotentialFamily& v2, const ChannelSpec& channel,
                              int n_r, const HarnessOptions& options = {}, int path_points = 5);

} // namespace dirac::harness
