#pragma once

#include "dirac/solver.hpp"

namespace dirac::oracle {

/// Spectroscopic labels of a Dirac-Coulomb level in three dimensions.
struct CoulombLevel {
    int n = 1;
    double j = 0.5;
    double alpha = 0.0;

    /// Raises DomainError unless n - j - 1/2 is a non-negative integer and
    /// 0 < alpha < j + 1/2.
    void validate() const;
};

/// Exact bound-state energy in units of the mass:
///   E = [1 + alpha^2 / (n - j - 1/2 + sqrt((j+1/2)^2 - alpha^2))^2]^{-1/2}
double coulomb_energy(const CoulombLevel& level);

/// dE/dalpha of the formula above; strictly negative.
double coulomb_energy_derivative(const CoulombLevel& level);

struct ChannelAssignment {
    ChannelSpec channel;
    int n_r; // nodes of psi1 expected from the solver
};

/// Map (n, j, tau) to the d = 3 solver channel and psi1 node count.
/// tau = -1: n_r = n - j - 1/2. tau = +1: the upper component has one node
/// fewer, n_r = n - j - 3/2, which requires n >= j + 3/2.
ChannelAssignment channel_of(const CoulombLevel& level, int tau, int d = 3);

} // namespace dirac::oracle
