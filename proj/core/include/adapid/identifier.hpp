#ifndef ADAPID_IDENTIFIER_HPP
#define ADAPID_IDENTIFIER_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "adapid/loss.hpp"

namespace adapid {

enum class SolverMode { ClosedFormRLS, GradientDescent, ProximalSubgradient, MultiStartLocal };

struct SolverSettings {
    std::optional<SolverMode> mode;   // absent: picked from the loss pair
    int max_iters = 5000;
    double grad_tol = 1e-10;
    double value_tol = 1e-10;
    bool warm_start = true;
    int n_starts = 8;                 // MultiStartLocal

    nlohmann::json to_json() const;
    static SolverSettings from_json(const nlohmann::json& j);
};

/// Solver selection when none is configured: closed-form recursion for the
/// quadratic pair, gradient descent for smooth convex losses, proximal
/// subgradient for Huber and Power(1), seeded multi-start for the nonconvex
/// Power(p < 1).
SolverMode pick_solver_mode(const LossSpec& psi, const LossSpec& psi0);

struct IdentifierConfig {
    double lambda = 0.9;              // forgetting factor, in (0, 1)
    LossSpec psi = LossSpec::power(2.0);
    LossSpec psi0 = LossSpec::scaled_sq_norm(1.0, 1);
    Eigen::VectorXd theta0;
    SolverSettings solver;
    double truncation_eps = 1e-12;    // drop samples once lambda^(t-k) falls below

    void validate() const;

    nlohmann::json to_json() const;
    static IdentifierConfig from_json(const nlohmann::json& j);
};

/// Per-step solver outcome. `converged` means the stationarity criterion was
/// met; `certified_global` is false when the objective is nonconvex and the
/// returned point may be a non-global minimizer. A step never fails silently:
/// non-convergence lands here with a note.
struct StepDiagnostics {
    int iters = 0;
    bool converged = true;
    bool certified_global = true;
    double grad_residual = 0.0;
    std::string note;

    bool flagged() const { return !converged || !certified_global; }
};

/// Classical exponentially-forgetting recursive least squares: the exact
/// minimizer path for psi(e) = e^2/2 with prior psi0(theta) = theta' P0^-1
/// theta. Serves as the closed-form oracle for the generic solver.
class RlsEstimator {
public:
    RlsEstimator(double lambda, const Eigen::MatrixXd& P0, Eigen::VectorXd theta0);

    /// Same recursion expressed against a prior written as theta' W theta
    /// (the convention used by vector LossSpecs); equivalent to P0 = 2 W^-1.
    static RlsEstimator with_prior_weight(double lambda, const Eigen::MatrixXd& W,
                                          Eigen::VectorXd theta0);

    void step(const Eigen::VectorXd& x, double y);

    const Eigen::VectorXd& theta_hat() const { return theta_hat_; }
    const Eigen::MatrixXd& covariance() const { return P_; }
    int time() const { return t_; }

private:
    RlsEstimator() = default;
    double lambda_ = 0.9;
    int t_ = 0;
    Eigen::MatrixXd P_;
    Eigen::VectorXd theta_hat_;
};

/// Streaming minimizer of the exponentially-forgetting objective
///   V_t(theta) = sum_k lambda^(t-k) psi(y_k - x_k' theta)
///              + lambda^t psi0(theta - theta0).
/// Each step() ingests one sample and re-solves for the minimizer with the
/// configured solver; cost() evaluates V_t on the retained history.
class Identifier {
public:
    explicit Identifier(IdentifierConfig config);

    void step(const Eigen::VectorXd& x, double y);

    /// V_t at an arbitrary point (restricted to retained history).
    double cost(const Eigen::VectorXd& theta) const;

    const Eigen::VectorXd& theta_hat() const { return theta_hat_; }
    double optimal_value() const { return v_opt_; }
    int time() const { return t_; }
    int history_size() const { return static_cast<int>(history_.size()); }
    const StepDiagnostics& diagnostics() const { return diag_; }
    const IdentifierConfig& config() const { return cfg_; }
    SolverMode mode() const { return mode_; }

    /// Covariance-style matrix of the closed-form path (RLS mode only).
    std::optional<Eigen::MatrixXd> rls_covariance() const;

    struct CoercivityReport {
        struct Row {
            double radius;
            double min_value;    // min of V_t over sampled directions at this radius
        };
        std::vector<Row> rows;
        double offset;           // sum_k lambda^(t-k) psi(y_k) + lambda^t psi0(theta0)
    };
    /// Evaluate V_t on expanding spheres (diagnostic; not on the solve path).
    CoercivityReport coercivity_probe(const std::vector<double>& radii, int n_directions = 64,
                                      std::uint64_t seed = 0) const;

private:
    struct Sample {
        Eigen::VectorXd x;
        double y;
        int k;       // 1-based arrival time
        double w;    // lambda^(t-k), refreshed via pow on every step
    };

    void refresh_weights();
    void truncate_history();
    void solve();

    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
    void solve_gradient_descent(Eigen::VectorXd start);
    void solve_proximal_subgradient(Eigen::VectorXd start);
    void solve_multi_start(const Eigen::VectorXd& warm);

    IdentifierConfig cfg_;
    SolverMode mode_;
    int n_ = 0;
    int t_ = 0;
    std::deque<Sample> history_;
    Eigen::VectorXd theta_hat_;
    double v_opt_ = 0.0;
    StepDiagnostics diag_;
    std::optional<RlsEstimator> rls_;
    std::uint64_t start_seed_ = 0;   // multi-start draw counter
};

/// Value-based optimality certificate: checks cost(theta_hat) <=
/// cost(probe) + value_tol over seeded random probes at several scales.
/// Returns the worst slack min(cost(probe) - cost(theta_hat)); negative
/// beyond value_tol means the certificate failed.
double minimizer_certificate(const Identifier& id, int n_probes = 100,
                             std::uint64_t seed = 0, double radius = 10.0);

} // namespace adapid

#endif
