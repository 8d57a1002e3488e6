#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace dirac {

/// Sign of dV/da over the sampled radii.
enum class SignClass { NonNegative, NonPositive, Indefinite };

std::string_view to_string(SignClass s);

/// Behaviour of V as r -> 0+.
struct OriginClass {
    enum class Kind { Regular, CoulombSingular };
    Kind kind = Kind::Regular;
    /// Coulomb strength alpha with r*V(r) -> -alpha; zero for Regular.
    double strength = 0.0;

    bool singular() const { return kind == Kind::CoulombSingular; }
};

/// Radial shapes f(r) available to the `coupling` family V = a*f(r).
enum class Shape {
    Exponential, // -exp(-r/b)
    Inverse,     // -1/(r+b)
    Yukawa,      // -exp(-b r)/r
    Mixed,       // (r/b - 1) exp(-r/b); changes sign, used as a negative control
};

std::string_view to_string(Shape s);
Shape parse_shape(std::string_view name);

/// A named central potential V(r; params) with one distinguished parameter.
///
/// Values are immutable. `with_param` and `with_active` return new families,
/// so one instance can be shared between threads and sweep points freely.
///
/// Built-in names:
///   pure-coulomb    V = -alpha/r
///   cutoff-coulomb  V = -alpha/(r+a)
///   coupling        V = a*f(r), f selected by Shape, length parameter b
///   homotopy        V = (1-t) V1 + t V2 (see make_homotopy)
class PotentialFamily {
public:
    static PotentialFamily pure_coulomb(double alpha);
    static PotentialFamily cutoff_coulomb(double alpha, double a, std::string active = "a");
    static PotentialFamily coupling(Shape shape, double a, double b = 1.0, std::string active = "a");

    /// Build a family by name. Unknown names or parameters raise ConfigError.
    static PotentialFamily make(std::string_view name, const std::map<std::string, double>& params,
                                std::string_view active = {},
                                std::optional<Shape> shape = std::nullopt);

    /// Parse `name key=value ...`, e.g. `cutoff-coulomb alpha=1.0 a=0.1 active=a`.
    /// `shape=<exp|inv|yukawa|mixed>` selects the coupling shape.
    static PotentialFamily parse(std::string_view spec);

    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    const std::string& active_param() const { return active_; }
    double param(std::string_view key) const;
    double active_value() const { return param(active_); }
    std::optional<Shape> shape() const { return shape_; }

    OriginClass origin_class() const;

    /// V(r). Raises DomainError for r <= 0.
    double evaluate(double r) const;

    /// lim_{r->0+} V(r) for Regular families; DomainError for singular ones.
    double origin_value() const;

    /// dV/d(active) at r.
    double param_derivative(double r) const { return param_derivative(r, active_); }
    double param_derivative(double r, std::string_view key) const;

    PotentialFamily with_param(std::string_view key, double value) const;
    PotentialFamily with_active(std::string_view key) const;

    /// Characteristic length (a, b, 1/alpha ...), used for grid and radius heuristics.
    double length_scale() const;

    /// Exact classification of dV/d(active) when it is known in closed form.
    std::optional<SignClass> analytic_sign() const;

    /// Round-trippable `name key=value ... active=x` string.
    std::string describe() const;

private:
    friend PotentialFamily make_homotopy(const PotentialFamily&, const PotentialFamily&, double);

    enum class Kind { PureCoulomb, CutoffCoulomb, Coupling, Homotopy };

    PotentialFamily() = default;
    void refresh();
    void validate() const;

    Kind kind_ = Kind::PureCoulomb;
    std::string name_;
    std::map<std::string, double> params_;
    std::string active_;
    std::optional<Shape> shape_;
    std::shared_ptr<const PotentialFamily> lower_, upper_;

    // cached numeric parameters, kept in sync with params_ by refresh()
    double alpha_ = 0.0, a_ = 0.0, b_ = 1.0, t_ = 0.0;
};

/// Classify the sign of dV/d(active) on a log-spaced grid over
/// [1e-6 r_max, r_max]. An analytic classification takes precedence.
SignClass classify_sign(const PotentialFamily& family, double r_max, int n_samples = 256);

/// Same sampling, ignoring any analytic override.
SignClass sample_sign(const PotentialFamily& family, double r_max, int n_samples = 256);

/// V(r, t) = (1-t) V1(r) + t V2(r) with active parameter t.
PotentialFamily make_homotopy(const PotentialFamily& v1, const PotentialFamily& v2, double t = 0.0);

} // namespace dirac
