#include "adapid/identifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapid/errors.hpp"
#include "adapid/rng.hpp"

namespace adapid {

namespace {

const char* mode_name(SolverMode m) {
    switch (m) {
    case SolverMode::ClosedFormRLS: return "closed_form_rls";
    case SolverMode::GradientDescent: return "gradient_descent";
    case SolverMode::ProximalSubgradient: return "proximal_subgradient";
    case SolverMode::MultiStartLocal: return "multi_start_local";
    }
    return "?";
}

SolverMode mode_from_name(const std::string& s) {
    if (s == "closed_form_rls") return SolverMode::ClosedFormRLS;
    if (s == "gradient_descent") return SolverMode::GradientDescent;
    if (s == "proximal_subgradient") return SolverMode::ProximalSubgradient;
    if (s == "multi_start_local") return SolverMode::MultiStartLocal;
    throw ContractError("unknown solver mode: " + s);
}

/// d psi / d e for the scalar residual losses (a subgradient at kinks).
double psi_prime(const LossSpec& psi, double e) {
    switch (psi.kind()) {
    case LossSpec::Kind::Power: {
        const double p = psi.param();
        if (e == 0.0) return 0.0;
        return p * std::pow(std::abs(e), p - 1.0) * (e > 0.0 ? 1.0 : -1.0);
    }
    case LossSpec::Kind::Huber: {
        const double h = psi.param();
        return std::abs(e) <= h ? e : (e > 0.0 ? h : -h);
    }
    default:
        throw ContractError("psi_prime requires a scalar residual loss");
    }
}

bool loss_pair_convex(const LossSpec& psi) {
    switch (psi.kind()) {
    case LossSpec::Kind::Power: return psi.param() >= 1.0;
    case LossSpec::Kind::Huber: return true;
    default: return true;
    }
}

/// Prior weight matrix W with psi0(theta) = theta' W theta.
Eigen::MatrixXd prior_weight(const LossSpec& psi0) {
    if (psi0.kind() == LossSpec::Kind::ScaledSquaredNorm)
        return psi0.param() * Eigen::MatrixXd::Identity(psi0.dim(), psi0.dim());
    if (psi0.kind() == LossSpec::Kind::QuadraticForm) return psi0.weight();
    throw ContractError("prior loss is not quadratic");
}

} // namespace

nlohmann::json SolverSettings::to_json() const {
    nlohmann::json j{{"max_iters", max_iters},
                     {"grad_tol", grad_tol},
                     {"value_tol", value_tol},
                     {"warm_start", warm_start},
                     {"n_starts", n_starts}};
    if (mode) j["mode"] = mode_name(*mode);
    return j;
}

SolverSettings SolverSettings::from_json(const nlohmann::json& j) {
    SolverSettings s;
    if (j.contains("mode")) s.mode = mode_from_name(j.at("mode").get<std::string>());
    s.max_iters = j.value("max_iters", s.max_iters);
    s.grad_tol = j.value("grad_tol", s.grad_tol);
    s.value_tol = j.value("value_tol", s.value_tol);
    s.warm_start = j.value("warm_start", s.warm_start);
    s.n_starts = j.value("n_starts", s.n_starts);
    return s;
}

SolverMode pick_solver_mode(const LossSpec& psi, const LossSpec& psi0) {
    if (psi.kind() == LossSpec::Kind::Power && psi.param() == 2.0 && psi0.is_quadratic())
        return SolverMode::ClosedFormRLS;
    if (psi.kind() == LossSpec::Kind::Huber) return SolverMode::ProximalSubgradient;
    if (psi.kind() == LossSpec::Kind::Power && psi.param() == 1.0)
        return SolverMode::ProximalSubgradient;
    if (psi.kind() == LossSpec::Kind::Power && psi.param() < 1.0)
        return SolverMode::MultiStartLocal;
    return SolverMode::GradientDescent;
}

void IdentifierConfig::validate() const {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ConfigError("forgetting factor must satisfy 0 < lambda < 1");
    if (!psi.is_scalar()) throw ConfigError("psi must be a scalar residual loss");
    if (!psi0.is_vector()) throw ConfigError("psi0 must be a vector prior loss");
    if (theta0.size() != psi0.dim())
        throw ConfigError("theta0 dimension does not match psi0");
    if (truncation_eps < 0.0) throw ConfigError("truncation_eps must be >= 0");
    if (!(solver.grad_tol > 0.0) || !(solver.value_tol > 0.0))
        throw ConfigError("solver tolerances must be positive");
    if (solver.n_starts < 1) throw ConfigError("n_starts must be >= 1");

    // A1-A3 are the convergence-bound hypotheses; reject losses that fail
    // them numerically before any estimation runs.
    for (const LossSpec* l : {&psi, &psi0}) {
        PropertyCheckOptions opts;
        opts.n_samples = 512;
        opts.seed = 0xA11CE;
        const double ref = (*l)(Eigen::VectorXd::Constant(l->dim(), opts.sample_radius));
        opts.tol = 1e-9 * std::max(1.0, ref);
        const PropertyReport rep = verify_properties(*l, opts);
        const double at_zero = (*l)(Eigen::VectorXd::Zero(l->dim()));
        if (at_zero != 0.0 || !rep.a2_pass || !rep.a3_pass)
            throw ConfigError("loss failed the A1-A3 property checks");
    }
}

nlohmann::json IdentifierConfig::to_json() const {
    std::vector<double> th(theta0.data(), theta0.data() + theta0.size());
    return {{"lambda", lambda},
            {"psi", psi.to_json()},
            {"psi0", psi0.to_json()},
            {"theta0", th},
            {"solver", solver.to_json()},
            {"truncation_eps", truncation_eps}};
}

IdentifierConfig IdentifierConfig::from_json(const nlohmann::json& j) {
    IdentifierConfig c;
    c.lambda = j.at("lambda").get<double>();
    c.psi = LossSpec::from_json(j.at("psi"));
    c.psi0 = LossSpec::from_json(j.at("psi0"));
    const auto th = j.at("theta0").get<std::vector<double>>();
    c.theta0 = Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<long>(th.size()));
    if (j.contains("solver")) c.solver = SolverSettings::from_json(j.at("solver"));
    c.truncation_eps = j.value("truncation_eps", c.truncation_eps);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// RlsEstimator

RlsEstimator::RlsEstimator(double lambda, const Eigen::MatrixXd& P0, Eigen::VectorXd theta0) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ContractError("RLS requires 0 < lambda < 1");
    if (P0.rows() != theta0.size() || P0.cols() != theta0.size())
        throw ContractError("P0 dimension does not match theta0");
    lambda_ = lambda;
    // prior psi0(theta) = theta' P0^-1 theta contributes Hessian 2 P0^-1,
    // so the information-matrix recursion starts at H0 = 2 P0^-1.
    P_ = 0.5 * P0;
    theta_hat_ = std::move(theta0);
}

RlsEstimator RlsEstimator::with_prior_weight(double lambda, const Eigen::MatrixXd& W,
                                             Eigen::VectorXd theta0) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ContractError("RLS requires 0 < lambda < 1");
    RlsEstimator r;
    r.lambda_ = lambda;
    r.P_ = W.ldlt().solve(Eigen::MatrixXd::Identity(W.rows(), W.cols()));
    r.theta_hat_ = std::move(theta0);
    return r;
}

void RlsEstimator::step(const Eigen::VectorXd& x, double y) {
    if (x.size() != theta_hat_.size())
        throw ContractError("RLS sample dimension mismatch");
    const Eigen::VectorXd Px = P_ * x;
    const double s = x.dot(Px);
    const double denom = lambda_ + s;
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw SolverError("RLS covariance update lost positive definiteness; "
                          "regularize the prior or increase lambda");
    const Eigen::VectorXd gain = Px / denom;
    theta_hat_ += gain * (y - x.dot(theta_hat_));
    P_ = (P_ - gain * Px.transpose()) / lambda_;
    P_ = 0.5 * (P_ + P_.transpose());   // keep symmetric under round-off
    if (!(P_.diagonal().minCoeff() > 0.0))
        throw SolverError("RLS covariance update lost positive definiteness; "
                          "regularize the prior or increase lambda");
    ++t_;
}

// ---------------------------------------------------------------------------
// Identifier

Identifier::Identifier(IdentifierConfig config) : cfg_(std::move(config)) {
    cfg_.validate();
    n_ = static_cast<int>(cfg_.theta0.size());
    mode_ = cfg_.solver.mode ? *cfg_.solver.mode : pick_solver_mode(cfg_.psi, cfg_.psi0);
    if (mode_ == SolverMode::ClosedFormRLS) {
        if (!(cfg_.psi.kind() == LossSpec::Kind::Power && cfg_.psi.param() == 2.0) ||
            !cfg_.psi0.is_quadratic())
            throw ConfigError("closed-form RLS requires psi = Power(2) and a quadratic psi0");
        rls_ = RlsEstimator::with_prior_weight(cfg_.lambda, prior_weight(cfg_.psi0), cfg_.theta0);
    }
    theta_hat_ = cfg_.theta0;
    v_opt_ = 0.0;   // V_0(theta0) = psi0(0) = 0
}

void Identifier::refresh_weights() {
    for (auto& s : history_)
        s.w = std::pow(cfg_.lambda, static_cast<double>(t_ - s.k));
}

double Identifier::cost(const Eigen::VectorXd& theta) const {
    if (theta.size() != n_) throw ContractError("cost argument dimension mismatch");
    double v = 0.0;
    for (const auto& s : history_) v += s.w * cfg_.psi(s.y - s.x.dot(theta));
    v += std::pow(cfg_.lambda, static_cast<double>(t_)) * cfg_.psi0(theta - cfg_.theta0);
    return v;
}

Eigen::VectorXd Identifier::gradient(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
    for (const auto& s : history_) {
        const double e = s.y - s.x.dot(theta);
        g.noalias() -= s.w * psi_prime(cfg_.psi, e) * s.x;
    }
    const double lt = std::pow(cfg_.lambda, static_cast<double>(t_));
    const Eigen::VectorXd d = theta - cfg_.theta0;
    if (cfg_.psi0.kind() == LossSpec::Kind::ScaledSquaredNorm)
        g.noalias() += lt * 2.0 * cfg_.psi0.param() * d;
    else
        g.noalias() += lt * 2.0 * (cfg_.psi0.weight() * d);
    return g;
}

void Identifier::truncate_history() {
    if (cfg_.truncation_eps <= 0.0) return;
    while (!history_.empty() && history_.front().w < cfg_.truncation_eps)
        history_.pop_front();
}

void Identifier::step(const Eigen::VectorXd& x, double y) {
    if (x.size() != n_) throw ContractError("sample dimension mismatch");
    ++t_;
    history_.push_back(Sample{x, y, t_, 1.0});
    refresh_weights();
    truncate_history();
    solve();
    v_opt_ = cost(theta_hat_);
}

void Identifier::solve() {
    diag_ = StepDiagnostics{};
    switch (mode_) {
    case SolverMode::ClosedFormRLS: {
        rls_->step(history_.back().x, history_.back().y);
        theta_hat_ = rls_->theta_hat();
        diag_.iters = 1;
        diag_.converged = true;
        diag_.certified_global = true;
        diag_.grad_residual = gradient(theta_hat_).norm();
        return;
    }
    case SolverMode::GradientDescent:
        solve_gradient_descent(cfg_.solver.warm_start ? theta_hat_ : cfg_.theta0);
        return;
    case SolverMode::ProximalSubgradient:
        solve_proximal_subgradient(cfg_.solver.warm_start ? theta_hat_ : cfg_.theta0);
        return;
    case SolverMode::MultiStartLocal:
        solve_multi_start(cfg_.solver.warm_start ? theta_hat_ : cfg_.theta0);
        return;
    }
}

void Identifier::solve_gradient_descent(Eigen::VectorXd theta) {
    double f = cost(theta);
    double step = 1.0;
    int iter = 0;
    double gnorm = 0.0;
    for (; iter < cfg_.solver.max_iters; ++iter) {
        const Eigen::VectorXd g = gradient(theta);
        gnorm = g.norm();
        if (gnorm <= cfg_.solver.grad_tol) break;
        // Armijo backtracking with a growing initial step
        double s = std::min(step * 2.0, 1e8);
        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            const Eigen::VectorXd cand = theta - s * g;
            const double fc = cost(cand);
            if (fc <= f - 1e-4 * s * gnorm * gnorm) {
                theta = cand;
                f = fc;
                step = s;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;   // no descent step found: at numerical precision
    }
    theta_hat_ = theta;
    diag_.iters = iter;
    diag_.grad_residual = gnorm;
    diag_.converged = gnorm <= cfg_.solver.grad_tol;
    diag_.certified_global = loss_pair_convex(cfg_.psi);
    if (!diag_.converged)
        diag_.note = "gradient descent stopped at residual " + std::to_string(gnorm);
}

void Identifier::solve_proximal_subgradient(Eigen::VectorXd theta) {
    const double lt = std::pow(cfg_.lambda, static_cast<double>(t_));
    const bool scaled_norm = cfg_.psi0.kind() == LossSpec::Kind::ScaledSquaredNorm;
    const Eigen::MatrixXd W = scaled_norm ? Eigen::MatrixXd() : cfg_.psi0.weight();

    auto data_value = [&](const Eigen::VectorXd& th) {
        double v = 0.0;
        for (const auto& s : history_) v += s.w * cfg_.psi(s.y - s.x.dot(th));
        return v;
    };
    auto data_subgrad = [&](const Eigen::VectorXd& th) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
        for (const auto& s : history_)
            g.noalias() -= s.w * psi_prime(cfg_.psi, s.y - s.x.dot(th)) * s.x;
        return g;
    };
    auto prox = [&](const Eigen::VectorXd& z, double s) -> Eigen::VectorXd {
        if (scaled_norm) {
            const double c = lt * cfg_.psi0.param();
            return (z + 2.0 * s * c * cfg_.theta0) / (1.0 + 2.0 * s * c);
        }
        const Eigen::MatrixXd A =
            Eigen::MatrixXd::Identity(n_, n_) + 2.0 * s * lt * W;
        return A.ldlt().solve(z + 2.0 * s * lt * (W * cfg_.theta0));
    };

    double best_cost = cost(theta);
    Eigen::VectorXd best = theta;
    double step = 1.0;
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    int ls_failures = 0;
    for (; iter < cfg_.solver.max_iters; ++iter) {
        const double f = data_value(theta);
        const Eigen::VectorXd g = data_subgrad(theta);
        double s = std::min(step * 2.0, 1e8);
        Eigen::VectorXd next;
        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            next = prox(theta - s * g, s);
            const Eigen::VectorXd d = next - theta;
            if (data_value(next) <= f + g.dot(d) + d.squaredNorm() / (2.0 * s)) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // nonsmooth data term near a kink: fall back to a diminishing
            // unguarded step and keep the best iterate seen
            ++ls_failures;
            s = 1.0 / (std::sqrt(static_cast<double>(iter + 1)) *
                       std::max(1.0, g.norm()));
            next = prox(theta - s * g, s);
        } else {
            step = s;
        }
        residual = (next - theta).norm() / s;
        theta = next;
        const double c = cost(theta);
        if (c < best_cost) {
            best_cost = c;
            best = theta;
        }
        if (accepted && residual <= cfg_.solver.grad_tol) break;
    }
    theta_hat_ = best;
    diag_.iters = iter;
    diag_.grad_residual = residual;
    diag_.converged = residual <= cfg_.solver.grad_tol;
    diag_.certified_global = loss_pair_convex(cfg_.psi);
    if (ls_failures > 0)
        diag_.note = "line search fell back to diminishing steps " +
                     std::to_string(ls_failures) + "x";
    else if (!diag_.converged)
        diag_.note = "proximal subgradient stopped at mapping residual " +
                     std::to_string(residual);
}

void Identifier::solve_multi_start(const Eigen::VectorXd& warm) {
    // Power(p < 1) objectives are nonconvex with cusps at zero residuals;
    // run graduated smoothing (e^2 + mu^2)^(p/2) from several starts and keep
    // the best point under the true objective.
    const double p = cfg_.psi.param();
    const double lt = std::pow(cfg_.lambda, static_cast<double>(t_));

    auto smooth_cost = [&](const Eigen::VectorXd& th, double mu) {
        double v = 0.0;
        for (const auto& s : history_) {
            const double e = s.y - s.x.dot(th);
            v += s.w * std::pow(e * e + mu * mu, 0.5 * p);
        }
        return v + lt * cfg_.psi0(th - cfg_.theta0);
    };
    auto smooth_grad = [&](const Eigen::VectorXd& th, double mu) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
        for (const auto& s : history_) {
            const double e = s.y - s.x.dot(th);
            g.noalias() -= s.w * p * e *
                           std::pow(e * e + mu * mu, 0.5 * p - 1.0) * s.x;
        }
        const Eigen::VectorXd d = th - cfg_.theta0;
        if (cfg_.psi0.kind() == LossSpec::Kind::ScaledSquaredNorm)
            g.noalias() += lt * 2.0 * cfg_.psi0.param() * d;
        else
            g.noalias() += lt * 2.0 * (cfg_.psi0.weight() * d);
        return g;
    };

    Rng rng(0x5EED0 + start_seed_++);
    std::vector<Eigen::VectorXd> starts{warm, cfg_.theta0, Eigen::VectorXd::Zero(n_)};
    while (static_cast<int>(starts.size()) < cfg_.solver.n_starts) {
        Eigen::VectorXd r(n_);
        for (int i = 0; i < n_; ++i) r[i] = warm[i] + rng.gaussian();
        starts.push_back(std::move(r));
    }

    Eigen::VectorXd best = warm;
    double best_cost = cost(warm);
    int total_iters = 0;
    for (const auto& s0 : starts) {
        Eigen::VectorXd th = s0;
        for (double mu = 1e-1; mu >= 1e-6; mu *= 0.1) {
            double f = smooth_cost(th, mu);
            double step = 1.0;
            for (int it = 0; it < 200; ++it) {
                ++total_iters;
                const Eigen::VectorXd g = smooth_grad(th, mu);
                const double gn = g.norm();
                if (gn <= std::max(cfg_.solver.grad_tol, 1e-4 * mu)) break;
                double s = std::min(step * 2.0, 1e6);
                bool ok = false;
                for (int bt = 0; bt < 60; ++bt) {
                    const Eigen::VectorXd cand = th - s * g;
                    const double fc = smooth_cost(cand, mu);
                    if (fc <= f - 1e-4 * s * gn * gn) {
                        th = cand;
                        f = fc;
                        step = s;
                        ok = true;
                        break;
                    }
                    s *= 0.5;
                }
                if (!ok) break;
            }
        }
        const double c = cost(th);
        if (c < best_cost) {
            best_cost = c;
            best = th;
        }
    }
    theta_hat_ = best;
    diag_.iters = total_iters;
    diag_.grad_residual = gradient(theta_hat_).norm();
    diag_.converged = true;   // local convergence; global status is separate
    diag_.certified_global = false;
    diag_.note = "multi-start local solve; global minimum not certified";
}

std::optional<Eigen::MatrixXd> Identifier::rls_covariance() const {
    if (!rls_) return std::nullopt;
    return rls_->covariance();
}

Identifier::CoercivityReport Identifier::coercivity_probe(const std::vector<double>& radii,
                                                          int n_directions,
                                                          std::uint64_t seed) const {
    CoercivityReport rep;
    double offset = 0.0;
    for (const auto& s : history_) offset += s.w * cfg_.psi(s.y);
    offset += std::pow(cfg_.lambda, static_cast<double>(t_)) * cfg_.psi0(cfg_.theta0);
    rep.offset = offset;

    Rng rng(seed);
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(static_cast<std::size_t>(n_directions));
    for (int i = 0; i < n_directions; ++i) dirs.push_back(rng.unit_sphere(n_));
    for (const double r : radii) {
        double mn = std::numeric_limits<double>::infinity();
        if (r == 0.0) {
            mn = cost(Eigen::VectorXd::Zero(n_));
        } else {
            for (const auto& d : dirs) mn = std::min(mn, cost(r * d));
        }
        rep.rows.push_back({r, mn});
    }
    return rep;
}

double minimizer_certificate(const Identifier& id, int n_probes, std::uint64_t seed,
                             double radius) {
    Rng rng(seed);
    const int n = static_cast<int>(id.theta_hat().size());
    const double v_opt = id.cost(id.theta_hat());
    double worst = std::numeric_limits<double>::infinity();
    const double scales[] = {1e-3, 1e-2, 1e-1, 1.0, radius};
    for (int i = 0; i < n_probes; ++i) {
        Eigen::VectorXd probe;
        if (i % 2 == 0) {
            const double s = scales[static_cast<std::size_t>(i / 2) % 5];
            probe = id.theta_hat() + s * rng.unit_sphere(n);
        } else {
            probe = rng.uniform_vector(n, -radius, radius);
        }
        worst = std::min(worst, id.cost(probe) - v_opt);
    }
    return worst;
}

} // namespace adapid
