#ifndef ADAPID_XI_FUNCTION_HPP
#define ADAPID_XI_FUNCTION_HPP

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace adapid {

/// A represented class-K-infinity function R+ -> R+: continuous, zero at
/// zero, strictly increasing and unbounded. Closed under min, max, sum and
/// positive scaling, which is what the comparison-function constructions in
/// this toolkit produce.
///
/// Inversion is analytic where possible (power terms; min inverts to max of
/// inverses, max to min of inverses) and falls back to bracketing plus
/// bisection otherwise, to |f(r) - y| <= 1e-10 * max(1, y).
class XiFunction {
public:
    enum class Kind { PowerTerm, MinOf, MaxOf, SumOf, Tabulated };

    /// r -> c * r^p with c > 0, p > 0.
    static XiFunction power_term(double c, double p);
    static XiFunction min_of(std::vector<XiFunction> terms);
    static XiFunction max_of(std::vector<XiFunction> terms);
    static XiFunction sum_of(std::vector<XiFunction> terms);
    /// Piecewise-linear interpolant of (grid, values); grid must start at 0
    /// with value 0 and both must be strictly increasing. Extrapolates
    /// linearly beyond the last knot.
    static XiFunction tabulated(std::vector<double> grid, std::vector<double> values);

    Kind kind() const { return kind_; }
    const std::vector<XiFunction>& terms() const { return terms_; }
    double coefficient() const { return c_; }
    double exponent() const { return p_; }

    double operator()(double r) const;

    /// Inverse value: the r >= 0 with f(r) = y. Requires y >= 0.
    double inverse(double y) const;

    /// Equivalent function with every value multiplied by c > 0 (the scalar
    /// is pushed into the representation tree, so power terms stay exact).
    XiFunction scaled(double c) const;

    /// Grid check of class-K-infinity membership: f(0) = 0, strictly
    /// increasing and finite on 64 log-spaced points over [1e-6, 1e6].
    bool verify_kinf() const;

    nlohmann::json to_json() const;
    static XiFunction from_json(const nlohmann::json& j);

private:
    XiFunction() = default;

    Kind kind_ = Kind::PowerTerm;
    double c_ = 1.0;           // PowerTerm
    double p_ = 1.0;           // PowerTerm
    std::vector<XiFunction> terms_;       // MinOf / MaxOf / SumOf
    std::vector<double> grid_, values_;   // Tabulated

    double invert_by_bisection(double y) const;
};

} // namespace adapid

#endif
