#ifndef ADAPID_ISS_HPP
#define ADAPID_ISS_HPP

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "adapid/loss.hpp"
#include "adapid/pe.hpp"
#include "adapid/xi_function.hpp"

namespace adapid {

/// Lower comparison function for the weighted excitation functional
///   G_t(theta) = a_psi sum lambda^(t-k) psi(x_k' theta)
///              + a_psi0 lambda^t psi0(theta):
/// xi = min(g11, g12) with g11(r) = a_psi lambda^(2T-1) alpha(r) and
/// g12(r) = a_psi0 lambda^(T-1) xi1(r), where alpha comes from the PE
/// certificate and xi1 from the sandwich bounds of psi0. This is the
/// function whose inverse appears in the estimation-error bound.
/// Both norms (PE and prior) must be Euclidean.
XiFunction build_xi_general(const PECertificate& cert, const LossSpec& psi,
                            const LossSpec& psi0, double lambda);

/// Upper comparison function g2 with G_t(theta) <= g2(|theta|):
/// g2(r) = a_psi * lambda^-T / (1 - lambda^T) * beta(r) + a_psi0 * xi2(r).
XiFunction build_g2(const PECertificate& cert, const LossSpec& psi, const LossSpec& psi0,
                    double lambda);

/// Right-hand side of the error bound via the forgetting recursion:
///   b_0 = 2 psi0(eta0),   b_t = lambda b_(t-1) + 2 psi(v_t).
/// Returns b_0..b_N for N = noise.size().
std::vector<double> bound_rhs(const std::vector<double>& noise, const LossSpec& psi,
                              const LossSpec& psi0, const Eigen::VectorXd& eta0,
                              double lambda);

struct BoundPoint {
    int t = 0;
    double err = 0.0;        // |theta_hat_t - theta_true|
    double b = 0.0;          // bound argument
    double xi_inv_b = 0.0;   // bound value
    bool violated = false;
    bool solver_flag = false;
};

struct BoundTrajectory {
    std::vector<BoundPoint> points;
    double tolerance = 0.0;

    int violations() const;
    /// Violations not co-flagged with a suspect solver step. A violation at
    /// a flagged step may just mean the minimizer was missed.
    int unexplained_violations() const;
    /// max over t of err - xi_inv_b (negative when the bound dominates).
    double max_margin() const;

    void write_csv(const std::filesystem::path& path) const;
};

/// Compare observed estimation errors against the bound. `estimates` starts
/// at theta_hat_0 and must have noise.size() + 1 entries; solver_flags (if
/// given) aligns with estimates.
BoundTrajectory check_iss(const std::vector<Eigen::VectorXd>& estimates,
                          const Eigen::VectorXd& theta_true,
                          const std::vector<double>& noise, const LossSpec& psi,
                          const LossSpec& psi0, double lambda, const XiFunction& xi,
                          double tolerance = 1e-6,
                          const std::vector<bool>& solver_flags = {});

/// Steady-state error bound for noise bounded by noise_sup:
///   xi^-1( 2 / (1 - lambda) * psi(noise_sup) ).
double asymptotic_bound(const LossSpec& psi, double lambda, double noise_sup,
                        const XiFunction& xi);

} // namespace adapid

#endif
