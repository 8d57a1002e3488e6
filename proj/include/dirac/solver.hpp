#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/potentials.hpp"

namespace dirac {

enum class Parity { Even, Odd };

std::string_view to_string(Parity p);

/// Quantum-number context of the radial problem.
///
/// For d > 1 the coupling constant is k_d = tau (j + (d-2)/2); for d = 1 it is
/// zero and states are labelled by parity instead.
struct ChannelSpec {
    int d = 3;
    std::optional<int> tau;
    std::optional<double> j;
    std::optional<Parity> parity;
    double mass = 1.0;

    static ChannelSpec radial(int d, int tau, double j, double mass = 1.0);
    static ChannelSpec line(Parity parity, double mass = 1.0);

    /// Raises ConfigError on inconsistent fields (e.g. d = 1 with tau set).
    void validate() const;
    double k() const;
};

/// Numerical knobs of a solve. Unset optionals are chosen automatically.
struct SolveConfig {
    std::optional<double> r_max;
    int n_grid = 4000;
    /// Grid start for d > 1 (default 1e-6 r_max).
    std::optional<double> r0;
    /// Length s of the shifted-log grid used for d = 1 (default 0.1 * family length).
    std::optional<double> origin_scale;
    double e_tol = 1e-10;
    double ode_rel_tol = 1e-10;
    double ode_abs_tol = 1e-12;
    int scan_points = 200;
    /// Multiplier on the automatically chosen matching radius.
    double match_scale = 1.0;
    std::optional<double> r_match;

    void validate() const;
};

/// A normalized eigenstate of the radial Dirac system.
struct BoundState {
    ChannelSpec channel;
    PotentialFamily family;
    double E = 0.0;
    RadialGrid grid;
    std::vector<double> psi1, psi2;
    int nodes = 0;
    int nodes_psi2 = 0; // diagnostic only
    double norm_residual = 0.0;
    double match_residual = 0.0;
    double r_match = 0.0;
};

using Spinor = std::array<double, 2>;

/// (psi1', psi2') from the coupled first-order equations.
Spinor rhs(double r, const Spinor& psi, double E, const ChannelSpec& channel, const PotentialFamily& family);

/// Regular solution near r = 0 (d > 1), leading Frobenius term, unit norm.
Spinor origin_seed(const ChannelSpec& channel, const PotentialFamily& family, double E, double r0);

/// Relative size of the first neglected Frobenius term at r0.
double origin_seed_error(const ChannelSpec& channel, const PotentialFamily& family, double E, double r0);

/// Decaying asymptotic ratio at large r: (1, -sqrt((m-E)/(m+E))).
Spinor tail_seed(const ChannelSpec& channel, double E);

/// Geometry used for one trial energy.
struct ShootingLayout {
    double r_seed = 0.0;  // outward integration start (0 for d = 1)
    double r_match = 0.0;
    double r_end = 0.0;   // inward integration start = output grid end
    double r0 = 0.0;      // output grid start (d > 1) or origin scale (d = 1)
};

ShootingLayout shooting_layout(double E, const ChannelSpec& channel, const PotentialFamily& family,
                               const SolveConfig& config);

/// Normalized Wronskian mismatch between outward and inward solutions at the
/// matching radius. Continuous in E; zero exactly at eigenvalues.
double match_function(double E, const ChannelSpec& channel, const PotentialFamily& family,
                      const SolveConfig& config);

struct Level {
    double E;
    int nodes;
};

/// All eigenvalues located by a scan over the gap, ascending, with node labels.
std::vector<Level> scan_spectrum(const ChannelSpec& channel, const PotentialFamily& family,
                                 const SolveConfig& config);

/// The eigenstate with `n_r` nodes of psi1. Dispatches to solve_1d for d = 1.
BoundState solve(const ChannelSpec& channel, const PotentialFamily& family, int n_r, const SolveConfig& config = {});

/// Parity sector of the 1-d problem on the half line, normalized over the full line.
BoundState solve_1d(const ChannelSpec& channel, const PotentialFamily& family, int n_r,
                    const SolveConfig& config = {});

/// Eigenstate whose energy is closest to `E_guess`, found by a local scan.
BoundState solve_near(const ChannelSpec& channel, const PotentialFamily& family, double E_guess,
                      const SolveConfig& config = {});

/// Assemble the normalized state at a given (already refined) energy.
BoundState assemble_state(double E, const ChannelSpec& channel, const PotentialFamily& family,
                          const SolveConfig& config);

/// |(psi1, D psi2) + (D psi1, psi2)|, zero when integration by parts holds.
double antisymmetry_residual(const BoundState& state);

/// Max pointwise residual of both eigen-equations with the discrete D,
/// excluding `skip` points at each end, relative to max(|psi1|, |psi2|).
double eigen_residual(const BoundState& state, int skip = 3);

} // namespace dirac
