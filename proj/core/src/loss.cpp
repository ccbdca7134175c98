#include "adapid/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "adapid/errors.hpp"
#include "adapid/rng.hpp"

namespace adapid {

LossSpec LossSpec::power(double p) {
    if (!(p > 0.0)) throw ContractError("Power loss requires p > 0");
    LossSpec s;
    s.kind_ = Kind::Power;
    s.param_ = p;
    return s;
}

LossSpec LossSpec::huber(double h) {
    if (!(h > 0.0)) throw ContractError("Huber loss requires h > 0");
    LossSpec s;
    s.kind_ = Kind::Huber;
    s.param_ = h;
    return s;
}

LossSpec LossSpec::scaled_sq_norm(double gamma0, int n) {
    if (!(gamma0 > 0.0)) throw ContractError("ScaledSquaredNorm requires gamma0 > 0");
    if (n < 1) throw ContractError("ScaledSquaredNorm requires n >= 1");
    LossSpec s;
    s.kind_ = Kind::ScaledSquaredNorm;
    s.param_ = gamma0;
    s.vector_arity_ = true;
    s.dim_ = n;
    return s;
}

LossSpec LossSpec::quadratic_form(Eigen::MatrixXd W) {
    if (W.rows() != W.cols() || W.rows() < 1)
        throw ContractError("QuadraticForm requires a square weight matrix");
    if (!W.isApprox(W.transpose(), 1e-12))
        throw ContractError("QuadraticForm weight must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(W);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw ContractError("QuadraticForm weight must be positive definite");
    LossSpec s;
    s.kind_ = Kind::QuadraticForm;
    s.vector_arity_ = true;
    s.dim_ = static_cast<int>(W.rows());
    s.W_ = std::move(W);
    return s;
}

double LossSpec::operator()(double e) const {
    switch (kind_) {
    case Kind::Power:
        return std::pow(std::abs(e), param_);
    case Kind::Huber: {
        const double a = std::abs(e);
        return a <= param_ ? 0.5 * e * e : param_ * (a - 0.5 * param_);
    }
    case Kind::ScaledSquaredNorm:
        if (dim_ != 1) throw ContractError("scalar evaluation of a vector loss");
        return param_ * e * e;
    case Kind::QuadraticForm:
        if (dim_ != 1) throw ContractError("scalar evaluation of a vector loss");
        return W_(0, 0) * e * e;
    }
    return 0.0;
}

double LossSpec::operator()(const Eigen::VectorXd& theta) const {
    if (theta.size() != dim_)
        throw ContractError("loss argument dimension mismatch: expected " +
                            std::to_string(dim_) + ", got " + std::to_string(theta.size()));
    switch (kind_) {
    case Kind::Power:
    case Kind::Huber:
        return (*this)(theta[0]);
    case Kind::ScaledSquaredNorm:
        return param_ * theta.squaredNorm();
    case Kind::QuadraticForm:
        return theta.dot(W_ * theta);
    }
    return 0.0;
}

double LossSpec::gti_constant() const {
    switch (kind_) {
    case Kind::Power:
        return param_ <= 1.0 ? std::pow(2.0, 1.0 - 1.0 / param_)
                             : std::pow(2.0, 1.0 - param_);
    case Kind::Huber:
    case Kind::ScaledSquaredNorm:
    case Kind::QuadraticForm:
        // convex symmetric kinds with f(1/2) = 1/4: midpoint convexity
        // gives l(x-y) >= 2 l(x/2) - l(y) >= l(x)/2 - l(y)
        return 0.5;
    }
    return 0.5;
}

double LossSpec::gh_value(double s) const {
    if (!(s > 0.0)) throw ContractError("gh_value requires s > 0");
    switch (kind_) {
    case Kind::Power:
        return std::pow(s, param_);
    case Kind::Huber:
        return std::min(s, s * s);
    case Kind::ScaledSquaredNorm:
    case Kind::QuadraticForm:
        return s * s;
    }
    return 0.0;
}

nlohmann::json LossSpec::to_json() const {
    nlohmann::json j;
    switch (kind_) {
    case Kind::Power:
        j["kind"] = "power";
        j["p"] = param_;
        break;
    case Kind::Huber:
        j["kind"] = "huber";
        j["h"] = param_;
        break;
    case Kind::ScaledSquaredNorm:
        j["kind"] = "scaled_sq_norm";
        j["gamma0"] = param_;
        j["n"] = dim_;
        break;
    case Kind::QuadraticForm: {
        j["kind"] = "quadratic_form";
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < dim_; ++k) rows[static_cast<std::size_t>(i)].push_back(W_(i, k));
        j["W"] = rows;
        break;
    }
    }
    return j;
}

LossSpec LossSpec::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") return power(j.at("p").get<double>());
    if (kind == "huber") return huber(j.at("h").get<double>());
    if (kind == "scaled_sq_norm")
        return scaled_sq_norm(j.at("gamma0").get<double>(), j.value("n", 1));
    if (kind == "quadratic_form") {
        const auto rows = j.at("W").get<std::vector<std::vector<double>>>();
        const int n = static_cast<int>(rows.size());
        Eigen::MatrixXd W(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
                throw ContractError("quadratic_form W must be square");
            for (int k = 0; k < n; ++k) W(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
        return quadratic_form(std::move(W));
    }
    throw ContractError("unknown loss kind: " + kind);
}

nlohmann::json PropertyReport::to_json() const {
    return nlohmann::json{{"a1", {{"pass", a1_pass}, {"margin", a1_margin}}},
                          {"a2", {{"pass", a2_pass}, {"margin", a2_margin}}},
                          {"a3", {{"pass", a3_pass}, {"margin", a3_margin}}},
                          {"a4", {{"pass", a4_pass}, {"margin", a4_margin}}},
                          {"samples", samples},
                          {"seed", seed},
                          {"tolerance", tolerance}};
}

namespace {

// Positivity floor for the away-from-origin part of the A1 check. Points
// with |x| >= 1e-2 must evaluate above this, which every supported kind does
// by orders of magnitude while a loss with a flat spot fails cleanly.
constexpr double kA1Floor = 1e-7;
constexpr double kA1Radius = 1e-2;

} // namespace

PropertyReport verify_properties(const std::function<double(const Eigen::VectorXd&)>& loss,
                                 int dim, double gti_candidate,
                                 const std::function<double(double)>& gh_family,
                                 const PropertyCheckOptions& opts) {
    if (dim < 1) throw ContractError("verify_properties requires dim >= 1");
    if (opts.n_samples < 1) throw ContractError("verify_properties requires n_samples >= 1");
    if (opts.tol < 0.0) throw ContractError("verify_properties requires tol >= 0");

    PropertyReport rep;
    rep.samples = opts.n_samples;
    rep.seed = opts.seed;
    rep.tolerance = opts.tol;

    Rng rng(opts.seed);
    const double R = opts.sample_radius;

    // A1 at the origin
    const double at_zero = loss(Eigen::VectorXd::Zero(dim));
    double a1 = opts.tol - at_zero;
    // A1 away from the origin: radial grid through 0 plus the random samples
    const double radii[] = {kA1Radius, 1e-1, 1.0, R};
    for (int d = 0; d < 8; ++d) {
        const Eigen::VectorXd dir = rng.unit_sphere(dim);
        for (const double r : radii) a1 = std::min(a1, loss(r * dir) - kA1Floor);
    }

    double a2 = 0.0;
    double a3 = std::numeric_limits<double>::infinity();
    double a4 = std::numeric_limits<double>::infinity();

    for (int i = 0; i < opts.n_samples; ++i) {
        const Eigen::VectorXd x = rng.uniform_vector(dim, -R, R);
        const Eigen::VectorXd y = rng.uniform_vector(dim, -R, R);

        const double lx = loss(x);
        if (x.lpNorm<Eigen::Infinity>() >= kA1Radius) a1 = std::min(a1, lx - kA1Floor);

        a2 = std::min(a2, -std::abs(lx - loss(-x)));
        a3 = std::min(a3, loss(x - y) - gti_candidate * lx + loss(y));

        // r log-uniform over [1e-2, 1e2], random sign: exercises both the
        // contraction and the expansion branch of the GH bound
        const double mag = std::pow(10.0, rng.uniform(-2.0, 2.0));
        const double r = rng.uniform01() < 0.5 ? -mag : mag;
        a4 = std::min(a4, lx - gh_family(1.0 / std::abs(r)) * loss(r * x));
    }

    rep.a1_margin = a1;
    rep.a2_margin = a2;
    rep.a3_margin = a3;
    rep.a4_margin = a4;
    rep.a1_pass = a1 >= -opts.tol;
    rep.a2_pass = a2 >= -opts.tol;
    rep.a3_pass = a3 >= -opts.tol;
    rep.a4_pass = a4 >= -opts.tol;
    return rep;
}

PropertyReport verify_properties(const LossSpec& spec, const PropertyCheckOptions& opts) {
    const double alpha = opts.gti_candidate.value_or(spec.gti_constant());
    std::function<double(double)> gh =
        opts.gh_candidate ? *opts.gh_candidate
                          : [&spec](double s) { return spec.gh_value(s); };
    return verify_properties([&spec](const Eigen::VectorXd& v) { return spec(v); },
                             spec.dim(), alpha, gh, opts);
}

namespace {

/// Pattern search on the unit sphere: from `start`, probe +-step along every
/// ambient axis (renormalized), repeat until no move improves, then shrink
/// the step. Steps run 1e-2 down to 1e-6.
Eigen::VectorXd refine_on_sphere(const std::function<double(const Eigen::VectorXd&)>& f,
                                 Eigen::VectorXd start, bool maximize) {
    const int n = static_cast<int>(start.size());
    const double sign = maximize ? -1.0 : 1.0;
    double best = sign * f(start);
    for (double step = 1e-2; step >= 1e-6; step *= 0.1) {
        bool improved = true;
        int guard = 0;
        while (improved && guard++ < 200) {
            improved = false;
            for (int i = 0; i < n; ++i) {
                for (const double delta : {step, -step}) {
                    Eigen::VectorXd cand = start;
                    cand[i] += delta;
                    cand.normalize();
                    const double v = sign * f(cand);
                    if (v < best) {
                        best = v;
                        start = cand;
                        improved = true;
                    }
                }
            }
        }
    }
    return start;
}

} // namespace

SphereExtremes sphere_extremes(const std::function<double(const Eigen::VectorXd&)>& f,
                               int dim, int n_samples, std::uint64_t seed) {
    if (dim < 1) throw ContractError("sphere_extremes requires dim >= 1");
    SphereExtremes out;
    out.exact = false;
    if (dim == 1) {
        Eigen::VectorXd plus(1), minus(1);
        plus << 1.0;
        minus << -1.0;
        out.d1 = std::min(f(plus), f(minus));
        out.d2 = std::max(f(plus), f(minus));
        return out;
    }

    Rng rng(seed);
    struct Scored {
        double v;
        Eigen::VectorXd dir;
    };
    std::vector<Scored> scored;
    scored.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        Eigen::VectorXd d = rng.unit_sphere(dim);
        scored.push_back({f(d), std::move(d)});
    }
    auto by_value = [](const Scored& a, const Scored& b) { return a.v < b.v; };
    std::sort(scored.begin(), scored.end(), by_value);

    const std::size_t n_starts = std::min<std::size_t>(10, scored.size());
    double d1 = scored.front().v;
    for (std::size_t i = 0; i < n_starts; ++i) {
        const Eigen::VectorXd r = refine_on_sphere(f, scored[i].dir, /*maximize=*/false);
        d1 = std::min(d1, f(r));
    }
    double d2 = scored.back().v;
    for (std::size_t i = 0; i < n_starts; ++i) {
        const Eigen::VectorXd r =
            refine_on_sphere(f, scored[scored.size() - 1 - i].dir, /*maximize=*/true);
        d2 = std::max(d2, f(r));
    }
    out.d1 = d1;
    out.d2 = d2;
    return out;
}

SphereExtremes sphere_extremes(const LossSpec& spec, NormTag /*norm*/, int n_samples,
                               std::uint64_t seed) {
    SphereExtremes out;
    switch (spec.kind()) {
    case LossSpec::Kind::ScaledSquaredNorm:
        out.d1 = out.d2 = spec.param();
        out.exact = true;
        return out;
    case LossSpec::Kind::QuadraticForm: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.weight());
        out.d1 = eig.eigenvalues().minCoeff();
        out.d2 = eig.eigenvalues().maxCoeff();
        out.exact = true;
        return out;
    }
    default:
        return sphere_extremes([&spec](const Eigen::VectorXd& v) { return spec(v); },
                               spec.dim(), n_samples, seed);
    }
}

std::pair<XiFunction, XiFunction> sandwich_bounds(const LossSpec& spec, NormTag norm) {
    if (!spec.is_vector())
        throw ContractError("sandwich_bounds requires a vector-arity loss");
    const SphereExtremes ext = sphere_extremes(spec, norm);
    // Supported vector kinds all have the quadratic GH family f(s) = s^2,
    // so both bounds are power terms: xi1 = D1 r^2, xi2 = D2 / (1/r)^2.
    return {XiFunction::power_term(ext.d1, 2.0), XiFunction::power_term(ext.d2, 2.0)};
}

} // namespace adapid
