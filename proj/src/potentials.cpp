#include "dirac/potentials.hpp"

#include <cmath>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

constexpr double kSignSlack = 1e-14;

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void require_positive(double r) {
    if (!(r > 0.0)) throw DomainError("potential evaluated at non-positive radius " + fmt_double(r));
}

} // namespace

std::string_view to_string(SignClass s) {
    switch (s) {
        case SignClass::NonNegative: return "NonNegative";
        case SignClass::NonPositive: return "NonPositive";
        case SignClass::Indefinite: return "Indefinite";
    }
    return "?";
}

std::string_view to_string(Shape s) {
    switch (s) {
        case Shape::Exponential: return "exp";
        case Shape::Inverse: return "inv";
        case Shape::Yukawa: return "yukawa";
        case Shape::Mixed: return "mixed";
    }
    return "?";
}

Shape parse_shape(std::string_view name) {
    if (name == "exp" || name == "exponential") return Shape::Exponential;
    if (name == "inv" || name == "inverse") return Shape::Inverse;
    if (name == "yukawa") return Shape::Yukawa;
    if (name == "mixed") return Shape::Mixed;
    throw ConfigError("unknown coupling shape '" + std::string(name) + "'");
}

PotentialFamily PotentialFamily::pure_coulomb(double alpha) {
    return make("pure-coulomb", {{"alpha", alpha}}, "alpha");
}

PotentialFamily PotentialFamily::cutoff_coulomb(double alpha, double a, std::string active) {
    return make("cutoff-coulomb", {{"alpha", alpha}, {"a", a}}, active);
}

PotentialFamily PotentialFamily::coupling(Shape shape, double a, double b, std::string active) {
    return make("coupling", {{"a", a}, {"b", b}}, active, shape);
}

PotentialFamily PotentialFamily::make(std::string_view name, const std::map<std::string, double>& params,
                                      std::string_view active, std::optional<Shape> shape) {
    PotentialFamily f;
    f.name_ = std::string(name);
    std::map<std::string, double> defaults;
    std::string default_active;
    if (name == "pure-coulomb") {
        f.kind_ = Kind::PureCoulomb;
        defaults = {{"alpha", 0.0}};
        default_active = "alpha";
    } else if (name == "cutoff-coulomb") {
        f.kind_ = Kind::CutoffCoulomb;
        defaults = {{"alpha", 1.0}, {"a", 1.0}};
        default_active = "a";
    } else if (name == "coupling") {
        f.kind_ = Kind::Coupling;
        defaults = {{"a", 1.0}, {"b", 1.0}};
        default_active = "a";
        f.shape_ = shape.value_or(Shape::Exponential);
    } else if (name == "homotopy") {
        throw ConfigError("homotopy families are built with make_homotopy, not by name");
    } else {
        throw ConfigError("unknown potential family '" + std::string(name) + "'");
    }
    if (shape && f.kind_ != Kind::Coupling) throw ConfigError("shape is only meaningful for the coupling family");
    if (f.kind_ == Kind::PureCoulomb && !params.count("alpha"))
        throw ConfigError("pure-coulomb requires alpha");
    for (const auto& [key, value] : params) {
        if (!defaults.count(key))
            throw ConfigError("family '" + f.name_ + "' has no parameter '" + key + "'");
        defaults[key] = value;
    }
    f.params_ = std::move(defaults);
    f.active_ = active.empty() ? default_active : std::string(active);
    if (!f.params_.count(f.active_))
        throw ConfigError("family '" + f.name_ + "' has no parameter '" + f.active_ + "' to make active");
    f.refresh();
    f.validate();
    return f;
}

PotentialFamily PotentialFamily::parse(std::string_view spec) {
    std::istringstream in{std::string(spec)};
    std::string name;
    if (!(in >> name)) throw ConfigError("empty potential family spec");
    std::map<std::string, double> params;
    std::string active;
    std::optional<Shape> shape;
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
            throw ConfigError("malformed family parameter '" + token + "' (expected key=value)");
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "active") {
            active = value;
        } else if (key == "shape") {
            shape = parse_shape(value);
        } else {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size()) throw ConfigError("parameter '" + key + "' is not a number: " + value);
            params[key] = x;
        }
    }
    return make(name, params, active, shape);
}

void PotentialFamily::refresh() {
    auto get = [&](const char* key, double fallback) {
        auto it = params_.find(key);
        return it == params_.end() ? fallback : it->second;
    };
    alpha_ = get("alpha", 0.0);
    a_ = get("a", 0.0);
    b_ = get("b", 1.0);
    t_ = get("t", 0.0);
}

void PotentialFamily::validate() const {
    for (const auto& [key, value] : params_)
        if (!std::isfinite(value)) throw ConfigError("parameter '" + key + "' is not finite");
    switch (kind_) {
        case Kind::PureCoulomb:
            if (!(alpha_ > 0.0)) throw DomainError("pure-coulomb requires alpha > 0");
            break;
        case Kind::CutoffCoulomb:
            if (!(alpha_ > 0.0)) throw DomainError("cutoff-coulomb requires alpha > 0");
            if (!(a_ > 0.0)) throw DomainError("cutoff-coulomb requires a > 0");
            break;
        case Kind::Coupling:
            if (!(b_ > 0.0)) throw DomainError("coupling requires b > 0");
            break;
        case Kind::Homotopy:
            break;
    }
}

double PotentialFamily::param(std::string_view key) const {
    auto it = params_.find(std::string(key));
    if (it == params_.end())
        throw ConfigError("family '" + name_ + "' has no parameter '" + std::string(key) + "'");
    return it->second;
}

OriginClass PotentialFamily::origin_class() const {
    switch (kind_) {
        case Kind::PureCoulomb:
            return {OriginClass::Kind::CoulombSingular, alpha_};
        case Kind::CutoffCoulomb:
            return {};
        case Kind::Coupling:
            if (*shape_ == Shape::Yukawa && a_ != 0.0) return {OriginClass::Kind::CoulombSingular, a_};
            return {};
        case Kind::Homotopy: {
            const double s = (1.0 - t_) * lower_->origin_class().strength + t_ * upper_->origin_class().strength;
            if (s != 0.0) return {OriginClass::Kind::CoulombSingular, s};
            return {};
        }
    }
    return {};
}

namespace {

double shape_value(Shape s, double b, double r) {
    switch (s) {
        case Shape::Exponential: return -std::exp(-r / b);
        case Shape::Inverse: return -1.0 / (r + b);
        case Shape::Yukawa: return -std::exp(-b * r) / r;
        case Shape::Mixed: return (r / b - 1.0) * std::exp(-r / b);
    }
    return 0.0;
}

// d f / d b
double shape_b_derivative(Shape s, double b, double r) {
    switch (s) {
        case Shape::Exponential: return -std::exp(-r / b) * r / (b * b);
        case Shape::Inverse: return 1.0 / ((r + b) * (r + b));
        case Shape::Yukawa: return std::exp(-b * r);
        case Shape::Mixed: {
            const double x = r / b;
            // f = (x-1) e^{-x}, df/dx = (2-x) e^{-x}, dx/db = -x/b
            return (2.0 - x) * std::exp(-x) * (-x / b);
        }
    }
    return 0.0;
}

} // namespace

double PotentialFamily::evaluate(double r) const {
    require_positive(r);
    switch (kind_) {
        case Kind::PureCoulomb: return -alpha_ / r;
        case Kind::CutoffCoulomb: return -alpha_ / (r + a_);
        case Kind::Coupling: return a_ * shape_value(*shape_, b_, r);
        case Kind::Homotopy: return (1.0 - t_) * lower_->evaluate(r) + t_ * upper_->evaluate(r);
    }
    return 0.0;
}

double PotentialFamily::origin_value() const {
    if (origin_class().singular()) throw DomainError("family '" + name_ + "' is singular at the origin");
    switch (kind_) {
        case Kind::PureCoulomb: break;
        case Kind::CutoffCoulomb: return -alpha_ / a_;
        case Kind::Coupling:
            switch (*shape_) {
                case Shape::Exponential: return -a_;
                case Shape::Inverse: return -a_ / b_;
                case Shape::Yukawa: return 0.0; // only reachable with a == 0
                case Shape::Mixed: return -a_;
            }
            break;
        case Kind::Homotopy: {
            // a singular endpoint with zero weight contributes nothing
            const double lo = t_ == 1.0 ? 0.0 : lower_->origin_value();
            const double hi = t_ == 0.0 ? 0.0 : upper_->origin_value();
            return (1.0 - t_) * lo + t_ * hi;
        }
    }
    return 0.0;
}

double PotentialFamily::param_derivative(double r, std::string_view key) const {
    require_positive(r);
    if (!params_.count(std::string(key)))
        throw ConfigError("family '" + name_ + "' has no registered derivative for '" + std::string(key) + "'");
    switch (kind_) {
        case Kind::PureCoulomb:
            return -1.0 / r;
        case Kind::CutoffCoulomb:
            if (key == "alpha") return -1.0 / (r + a_);
            return alpha_ / ((r + a_) * (r + a_));
        case Kind::Coupling:
            if (key == "a") return shape_value(*shape_, b_, r);
            return a_ * shape_b_derivative(*shape_, b_, r);
        case Kind::Homotopy:
            return upper_->evaluate(r) - lower_->evaluate(r);
    }
    return 0.0;
}

PotentialFamily PotentialFamily::with_param(std::string_view key, double value) const {
    auto it = params_.find(std::string(key));
    if (it == params_.end())
        throw ConfigError("family '" + name_ + "' has no parameter '" + std::string(key) + "'");
    PotentialFamily f = *this;
    f.params_[it->first] = value;
    f.refresh();
    f.validate();
    return f;
}

PotentialFamily PotentialFamily::with_active(std::string_view key) const {
    if (!params_.count(std::string(key)))
        throw ConfigError("family '" + name_ + "' has no parameter '" + std::string(key) + "' to make active");
    PotentialFamily f = *this;
    f.active_ = std::string(key);
    return f;
}

double PotentialFamily::length_scale() const {
    switch (kind_) {
        case Kind::PureCoulomb: return 1.0 / alpha_;
        case Kind::CutoffCoulomb: return std::max(a_, 1.0 / alpha_);
        case Kind::Coupling: return *shape_ == Shape::Yukawa ? 1.0 / b_ : b_;
        case Kind::Homotopy: return std::max(lower_->length_scale(), upper_->length_scale());
    }
    return 1.0;
}

std::optional<SignClass> PotentialFamily::analytic_sign() const {
    switch (kind_) {
        case Kind::PureCoulomb:
            return SignClass::NonPositive;
        case Kind::CutoffCoulomb:
            return active_ == "alpha" ? SignClass::NonPositive : SignClass::NonNegative;
        case Kind::Coupling: {
            if (active_ == "a") {
                if (*shape_ == Shape::Mixed) return SignClass::Indefinite;
                return SignClass::NonPositive;
            }
            if (*shape_ == Shape::Mixed) return std::nullopt;
            // b-derivative: exp shape ~ -a, inv and yukawa ~ +a
            const bool negative = (*shape_ == Shape::Exponential) == (a_ >= 0.0);
            return negative ? SignClass::NonPositive : SignClass::NonNegative;
        }
        case Kind::Homotopy:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string PotentialFamily::describe() const {
    std::ostringstream os;
    os << name_;
    if (kind_ == Kind::Homotopy) {
        os << " t=" << fmt_double(t_) << " lower={" << lower_->describe() << "} upper={" << upper_->describe()
           << "}";
        return os.str();
    }
    if (shape_) os << " shape=" << to_string(*shape_);
    for (const auto& [key, value] : params_) os << ' ' << key << '=' << fmt_double(value);
    os << " active=" << active_;
    return os.str();
}

SignClass sample_sign(const PotentialFamily& family, double r_max, int n_samples) {
    if (n_samples < 64) throw ConfigError("classify_sign needs at least 64 samples");
    if (!(r_max > 0.0)) throw DomainError("classify_sign needs r_max > 0");
    const double r_min = 1e-6 * r_max;
    const double step = std::log(r_max / r_min) / (n_samples - 1);
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n_samples; ++i) {
        const double r = i + 1 == n_samples ? r_max : r_min * std::exp(step * i);
        const double va = family.param_derivative(r);
        has_pos |= va > kSignSlack;
        has_neg |= va < -kSignSlack;
    }
    if (!has_neg) return SignClass::NonNegative;
    if (!has_pos) return SignClass::NonPositive;
    return SignClass::Indefinite;
}

SignClass classify_sign(const PotentialFamily& family, double r_max, int n_samples) {
    if (n_samples < 64) throw ConfigError("classify_sign needs at least 64 samples");
    if (auto s = family.analytic_sign()) return *s;
    return sample_sign(family, r_max, n_samples);
}

PotentialFamily make_homotopy(const PotentialFamily& v1, const PotentialFamily& v2, double t) {
    PotentialFamily f;
    f.kind_ = PotentialFamily::Kind::Homotopy;
    f.name_ = "homotopy";
    f.params_ = {{"t", t}};
    f.active_ = "t";
    f.lower_ = std::make_shared<const PotentialFamily>(v1);
    f.upper_ = std::make_shared<const PotentialFamily>(v2);
    f.refresh();
    f.validate();
    return f;
}

} // namespace dirac
