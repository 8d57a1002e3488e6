#pragma once

#include <span>
#include <vector>

namespace dirac {

/// Radial grid uniform in an auxiliary coordinate t.
///
/// Logarithmic:    r = r0 * exp(t),           t in [0, T], grid starts at r0 > 0
/// ShiftedLog:     r = s * (exp(t) - 1),      t in [0, T], grid starts at r = 0
///
/// `measure` multiplies every integral; it is 2 for half-line grids that
/// stand in for the full line of a parity-symmetric 1-d problem.
struct RadialGrid {
    enum class Kind { Logarithmic, ShiftedLog };

    Kind kind = Kind::Logarithmic;
    double scale = 1.0; // r0 (Logarithmic) or s (ShiftedLog)
    double step = 0.0;  // uniform spacing in t
    double measure = 1.0;
    std::vector<double> r;   // radii, strictly increasing
    std::vector<double> jac; // dr/dt at each radius

    static RadialGrid logarithmic(double r0, double r_max, int n);
    static RadialGrid shifted_log(double s, double r_max, int n, double measure = 1.0);

    std::size_t size() const { return r.size(); }
    bool starts_at_origin() const { return kind == Kind::ShiftedLog; }

    double t_of(double radius) const;
    double r_of(double t) const;
    /// dr/dt at coordinate t.
    double jac_of(double t) const;
    std::vector<double> t_values() const;

    bool same_as(const RadialGrid& other) const;
};

/// Quadrature of u*v over the grid: composite Simpson in t (Simpson 3/8 on the
/// last three intervals when the interval count is odd). Grids that start at
/// r0 > 0 add the [0, r0] piece assuming local power-law behaviour of u*v.
double inner_product(std::span<const double> u, std::span<const double> v, const RadialGrid& grid);

/// Same quadrature with a pointwise weight: (u, w v).
double weighted_inner_product(std::span<const double> u, std::span<const double> w, std::span<const double> v,
                              const RadialGrid& grid);

/// d/dr by 4th-order finite differences in t (one-sided 5-point stencils at
/// both ends), divided by dr/dt.
std::vector<double> derivative(std::span<const double> u, const RadialGrid& grid);

/// Count strict sign changes, ignoring samples with |u| <= deadband.
int count_sign_changes(std::span<const double> u, double deadband);

} // namespace dirac
