#include "adapid/iss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "adapid/errors.hpp"
#include "csv_util.hpp"

namespace adapid {

XiFunction build_xi_general(const PECertificate& cert, const LossSpec& psi,
                            const LossSpec& psi0, double lambda) {
    if (!cert.is_pe) throw ContractError("build_xi_general requires a PE certificate");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ContractError("build_xi_general requires 0 < lambda < 1");
    if (cert.norm != NormTag::Euclidean)
        throw ConfigError("PE certificate norm must be Euclidean");
    if (!psi0.is_vector()) throw ContractError("psi0 must be a vector prior loss");

    const double a_psi = psi.gti_constant();
    const double a_psi0 = psi0.gti_constant();
    const int T = cert.T;

    const KInfinityPair kinf = kinf_from_gamma(cert);
    const XiFunction g11 = kinf.alpha.scaled(a_psi * std::pow(lambda, 2.0 * T - 1.0));
    const auto [xi1, xi2] = sandwich_bounds(psi0);
    const XiFunction g12 = xi1.scaled(a_psi0 * std::pow(lambda, T - 1.0));
    XiFunction xi = XiFunction::min_of({g11, g12});
    if (!xi.verify_kinf())
        throw SolverError("constructed xi failed the class-K-infinity grid check");
    return xi;
}

XiFunction build_g2(const PECertificate& cert, const LossSpec& psi, const LossSpec& psi0,
                    double lambda) {
    if (!cert.is_pe) throw ContractError("build_g2 requires a PE certificate");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ContractError("build_g2 requires 0 < lambda < 1");
    const double a_psi = psi.gti_constant();
    const double a_psi0 = psi0.gti_constant();
    const double lT = std::pow(lambda, static_cast<double>(cert.T));
    // sum over aligned windows of lambda^(t-iT) beta is at most
    // beta / (lambda^T (1 - lambda^T)), uniformly in t
    const double c_beta = a_psi / (lT * (1.0 - lT));

    const KInfinityPair kinf = kinf_from_gamma(cert);
    const auto [xi1, xi2] = sandwich_bounds(psi0);
    XiFunction g2 = XiFunction::sum_of({kinf.beta.scaled(c_beta), xi2.scaled(a_psi0)});
    if (!g2.verify_kinf())
        throw SolverError("constructed g2 failed the class-K-infinity grid check");
    return g2;
}

std::vector<double> bound_rhs(const std::vector<double>& noise, const LossSpec& psi,
                              const LossSpec& psi0, const Eigen::VectorXd& eta0,
                              double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ContractError("bound_rhs requires 0 < lambda < 1");
    std::vector<double> b;
    b.reserve(noise.size() + 1);
    b.push_back(2.0 * psi0(eta0));
    for (const double v : noise) b.push_back(lambda * b.back() + 2.0 * psi(v));
    return b;
}

int BoundTrajectory::violations() const {
    int c = 0;
    for (const auto& p : points) c += p.violated ? 1 : 0;
    return c;
}

int BoundTrajectory::unexplained_violations() const {
    int c = 0;
    for (const auto& p : points) c += (p.violated && !p.solver_flag) ? 1 : 0;
    return c;
}

double BoundTrajectory::max_margin() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) m = std::max(m, p.err - p.xi_inv_b);
    return m;
}

void BoundTrajectory::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write bound trajectory: " + path.string());
    out << "t,err,b,xi_inv_b,violated,solver_flag\n";
    for (const auto& p : points) {
        out << p.t << "," << detail::format_double(p.err) << ","
            << detail::format_double(p.b) << "," << detail::format_double(p.xi_inv_b) << ","
            << (p.violated ? 1 : 0) << "," << (p.solver_flag ? 1 : 0) << "\n";
    }
}

BoundTrajectory check_iss(const std::vector<Eigen::VectorXd>& estimates,
                          const Eigen::VectorXd& theta_true,
                          const std::vector<double>& noise, const LossSpec& psi,
                          const LossSpec& psi0, double lambda, const XiFunction& xi,
                          double tolerance, const std::vector<bool>& solver_flags) {
    if (estimates.size() != noise.size() + 1)
        throw ContractError("check_iss: estimates must have noise.size() + 1 entries");
    if (!solver_flags.empty() && solver_flags.size() != estimates.size())
        throw ContractError("check_iss: solver_flags length mismatch");

    const std::vector<double> b =
        bound_rhs(noise, psi, psi0, estimates.front() - theta_true, lambda);

    BoundTrajectory traj;
    traj.tolerance = tolerance;
    traj.points.reserve(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        BoundPoint p;
        p.t = static_cast<int>(i);
        p.err = (estimates[i] - theta_true).norm();
        p.b = b[i];
        p.xi_inv_b = xi.inverse(b[i]);
        p.solver_flag = !solver_flags.empty() && solver_flags[i];
        p.violated = p.err > p.xi_inv_b + tolerance;
        traj.points.push_back(p);
    }
    return traj;
}

double asymptotic_bound(const LossSpec& psi, double lambda, double noise_sup,
                        const XiFunction& xi) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ContractError("asymptotic_bound requires 0 < lambda < 1");
    if (noise_sup < 0.0) throw ContractError("asymptotic_bound requires noise_sup >= 0");
    // supported psi are symmetric and nondecreasing on [0, inf), so the
    // sup over |v| <= noise_sup is attained at the bound itself
    return xi.inverse(2.0 / (1.0 - lambda) * psi(noise_sup));
}

} // namespace adapid
