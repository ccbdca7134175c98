#ifndef ADAPID_LOSS_HPP
#define ADAPID_LOSS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "adapid/xi_function.hpp"

namespace adapid {

enum class NormTag { Euclidean };

/// A loss function together with its structural constants.
///
/// Scalar kinds (residual losses psi : R -> R+):
///   Power(p):  e -> |e|^p,                        p > 0
///   Huber(h):  e -> e^2/2 if |e| <= h,            h > 0
///              e -> h(|e| - h/2) otherwise
/// Vector kinds (prior losses psi0 : R^n -> R+):
///   ScaledSquaredNorm(gamma0): theta -> gamma0 * |theta|^2
///   QuadraticForm(W):          theta -> theta' W theta, W symmetric PD
///
/// Every supported kind is positive-definite and symmetric, satisfies a
/// generalized triangle inequality l(x - y) >= a * l(x) - l(y) with the
/// constant reported by gti_constant(), and a generalized homogeneity bound
/// l(x) >= f(1/|r|) * l(r x) with the class-K-infinity family reported by
/// gh_value(). verify_properties() checks all four numerically.
class LossSpec {
public:
    enum class Kind { Power, Huber, ScaledSquaredNorm, QuadraticForm };

    static LossSpec power(double p);
    static LossSpec huber(double h);
    static LossSpec scaled_sq_norm(double gamma0, int n);
    static LossSpec quadratic_form(Eigen::MatrixXd W);

    Kind kind() const { return kind_; }
    bool is_scalar() const { return dim_ == 1 && vector_arity_ == false; }
    bool is_vector() const { return vector_arity_; }
    bool is_quadratic() const {
        return kind_ == Kind::ScaledSquaredNorm || kind_ == Kind::QuadraticForm;
    }
    /// Argument dimension (1 for scalar losses).
    int dim() const { return dim_; }

    double param() const { return param_; }          // p, h or gamma0
    const Eigen::MatrixXd& weight() const { return W_; } // QuadraticForm only

    /// Evaluate the loss. Vector overload checks the argument dimension.
    double operator()(double e) const;
    double operator()(const Eigen::VectorXd& theta) const;

    /// GTI constant a with l(x - y) >= a l(x) - l(y) for all x, y.
    double gti_constant() const;

    /// GH family value f(s) at s > 0, with l(x) >= f(1/|r|) l(r x).
    double gh_value(double s) const;

    nlohmann::json to_json() const;
    static LossSpec from_json(const nlohmann::json& j);

private:
    LossSpec() = default;

    Kind kind_ = Kind::Power;
    bool vector_arity_ = false;
    int dim_ = 1;
    double param_ = 2.0;
    Eigen::MatrixXd W_;
};

/// Outcome of the numerical A1-A4 property checks. Margins are the worst
/// observed slack per property; a report passes when every margin is
/// >= -tolerance.
struct PropertyReport {
    bool a1_pass = false, a2_pass = false, a3_pass = false, a4_pass = false;
    double a1_margin = 0.0, a2_margin = 0.0, a3_margin = 0.0, a4_margin = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;

    bool all_pass() const { return a1_pass && a2_pass && a3_pass && a4_pass; }
    nlohmann::json to_json() const;
};

struct PropertyCheckOptions {
    int n_samples = 10000;
    std::uint64_t seed = 0;
    double tol = 1e-9;              // absolute margin tolerance
    double sample_radius = 10.0;    // arguments drawn from [-R, R]^n
    /// Candidate GTI constant to verify instead of the spec's own.
    std::optional<double> gti_candidate;
    /// Candidate GH family to verify instead of the spec's own.
    std::optional<std::function<double(double)>> gh_candidate;
};

/// Check A1 (positive-definite), A2 (symmetric), A3 (GTI with the candidate
/// constant) and A4 (GH with the candidate family) on seeded random samples.
/// Failures are reported in the margins, never thrown.
PropertyReport verify_properties(const LossSpec& spec, const PropertyCheckOptions& opts = {});

/// Same checks for an arbitrary loss callable (test injection of broken
/// losses). `dim` is the argument dimension, 1 for scalar.
PropertyReport verify_properties(const std::function<double(const Eigen::VectorXd&)>& loss,
                                 int dim, double gti_candidate,
                                 const std::function<double(double)>& gh_family,
                                 const PropertyCheckOptions& opts = {});

/// Sphere extremes D1 = min, D2 = max of the loss on the unit sphere.
/// Exact (extreme eigenvalues) for the quadratic kinds; otherwise estimated
/// by seeded sphere sampling with local refinement.
struct SphereExtremes {
    double d1 = 0.0;
    double d2 = 0.0;
    bool exact = false;
};
SphereExtremes sphere_extremes(const LossSpec& spec, NormTag norm = NormTag::Euclidean,
                               int n_samples = 10000, std::uint64_t seed = 0);

/// Sampling-only variant for an arbitrary callable on the unit sphere of
/// R^dim (also the workhorse behind the excitation-window estimates).
SphereExtremes sphere_extremes(const std::function<double(const Eigen::VectorXd&)>& f,
                               int dim, int n_samples, std::uint64_t seed);

/// Sandwich pair of Lemma-style bounds for a vector loss:
///   xi1(r) = D1 * f(r)  <=  l(theta)  <=  D2 / f(1/r) = xi2(r)
/// for r = |theta|. Requires a vector-arity spec.
std::pair<XiFunction, XiFunction> sandwich_bounds(const LossSpec& spec,
                                                  NormTag norm = NormTag::Euclidean);

} // namespace adapid

#endif
