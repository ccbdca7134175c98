#ifndef ADAPID_PE_HPP
#define ADAPID_PE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "adapid/loss.hpp"
#include "adapid/signal.hpp"
#include "adapid/xi_function.hpp"

namespace adapid {

enum class PEMethod { SphereSampling, EigenExact };

struct SphereSamplerSettings {
    int n_samples = 4096;
    std::uint64_t seed = 0;
    /// Use sampling even where the eigen-exact path applies (testing).
    bool force_sampling = false;
};

/// Unit-sphere extremes of theta -> sum_k psi(x_k' theta) over one window.
/// Exact extreme Gram eigenvalues for Power(2) with the Euclidean norm;
/// otherwise estimated by seeded sampling with local refinement, in which
/// case g1 is an upper estimate of the true infimum and g2 a lower estimate
/// of the supremum.
struct WindowGamma {
    double g1 = 0.0;
    double g2 = 0.0;
    PEMethod method = PEMethod::SphereSampling;
};

WindowGamma window_gamma(const std::vector<Eigen::VectorXd>& window, const LossSpec& psi,
                         const SphereSamplerSettings& sampler = {});

/// Excitation certificate over every length-T window of a regressor stream.
/// gamma1 is the minimum window infimum and gamma2 the maximum window
/// supremum; is_pe holds when gamma1 clears the configured floor. The
/// certificate only speaks for the windows actually checked.
struct PECertificate {
    int T = 1;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    LossSpec loss = LossSpec::power(2.0);
    NormTag norm = NormTag::Euclidean;
    PEMethod method = PEMethod::EigenExact;
    int windows_checked = 0;
    int dim = 0;
    double gamma_floor = 1e-10;
    bool is_pe = false;

    nlohmann::json to_json() const;
    static PECertificate from_json(const nlohmann::json& j);
};

struct PECertifyOptions {
    SphereSamplerSettings sampler;
    double gamma_floor = 1e-10;
};

PECertificate certify_pe(const std::vector<Eigen::VectorXd>& regressors, const LossSpec& psi,
                         int T, const PECertifyOptions& opts = {});
PECertificate certify_pe(const Trajectory& trajectory, const LossSpec& psi, int T,
                         const PECertifyOptions& opts = {});

/// Scan mode: try window lengths in order and return the first certificate
/// that is PE, or the last one tried when none is. Default scan for
/// dimension n is {n, 2n, 4n}.
PECertificate certify_pe_scan(const Trajectory& trajectory, const LossSpec& psi,
                              const std::vector<int>& Ts, const PECertifyOptions& opts = {});

/// The comparison-function form of the excitation condition:
///   alpha(|theta|) <= sum_k psi(x_k' theta) <= beta(|theta|).
struct KInfinityPair {
    XiFunction alpha;
    XiFunction beta;

    bool verify() const { return alpha.verify_kinf() && beta.verify_kinf(); }
};

/// alpha(r) = gamma1 f_psi(r), beta(r) = gamma2 / f_psi(1/r) from a PE
/// certificate. Requires cert.is_pe (gamma1 = 0 would not give a
/// class-K-infinity lower function).
KInfinityPair kinf_from_gamma(const PECertificate& cert);

/// Recover (gamma1, gamma2) = (alpha(1), beta(1)).
std::pair<double, double> gamma_from_kinf(const KInfinityPair& pair);

} // namespace adapid

#endif
