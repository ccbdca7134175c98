#include "adapid/pe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapid/errors.hpp"

namespace adapid {

namespace {

bool eigen_exact_applies(const LossSpec& psi) {
    return psi.kind() == LossSpec::Kind::Power && psi.param() == 2.0;
}

} // namespace

WindowGamma window_gamma(const std::vector<Eigen::VectorXd>& window, const LossSpec& psi,
                         const SphereSamplerSettings& sampler) {
    if (window.empty()) throw ContractError("window_gamma requires a nonempty window");
    if (!psi.is_scalar()) throw ContractError("window_gamma requires a scalar loss");
    const int n = static_cast<int>(window.front().size());
    for (const auto& x : window)
        if (x.size() != n) throw ContractError("window regressors have mixed dimensions");

    WindowGamma out;
    if (eigen_exact_applies(psi) && !sampler.force_sampling) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        for (const auto& x : window) gram.noalias() += x * x.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        out.g1 = eig.eigenvalues().minCoeff();
        out.g2 = eig.eigenvalues().maxCoeff();
        out.method = PEMethod::EigenExact;
        return out;
    }

    // stack the window once so each direction costs one mat-vec
    Eigen::MatrixXd X(static_cast<long>(window.size()), n);
    for (std::size_t i = 0; i < window.size(); ++i) X.row(static_cast<long>(i)) = window[i];
    auto excitation = [&](const Eigen::VectorXd& d) {
        const Eigen::VectorXd u = X * d;
        double v = 0.0;
        for (long i = 0; i < u.size(); ++i) v += psi(u[i]);
        return v;
    };
    const SphereExtremes ext = sphere_extremes(excitation, n, sampler.n_samples, sampler.seed);
    out.g1 = ext.d1;
    out.g2 = ext.d2;
    out.method = PEMethod::SphereSampling;
    return out;
}

PECertificate certify_pe(const std::vector<Eigen::VectorXd>& regressors, const LossSpec& psi,
                         int T, const PECertifyOptions& opts) {
    if (T < 1) throw ContractError("certify_pe requires T >= 1");
    if (static_cast<int>(regressors.size()) < T)
        throw ContractError("trajectory shorter than the window length T");

    PECertificate cert;
    cert.T = T;
    cert.loss = psi;
    cert.gamma_floor = opts.gamma_floor;
    cert.dim = static_cast<int>(regressors.front().size());
    cert.method = eigen_exact_applies(psi) && !opts.sampler.force_sampling
                      ? PEMethod::EigenExact
                      : PEMethod::SphereSampling;

    double g1 = std::numeric_limits<double>::infinity();
    double g2 = 0.0;
    const int n_windows = static_cast<int>(regressors.size()) - T + 1;
    std::vector<Eigen::VectorXd> window(static_cast<std::size_t>(T));
    for (int s = 0; s < n_windows; ++s) {
        for (int i = 0; i < T; ++i) window[static_cast<std::size_t>(i)] = regressors[static_cast<std::size_t>(s + i)];
        SphereSamplerSettings sampler = opts.sampler;
        sampler.seed = opts.sampler.seed + static_cast<std::uint64_t>(s);
        const WindowGamma wg = window_gamma(window, psi, sampler);
        g1 = std::min(g1, wg.g1);
        g2 = std::max(g2, wg.g2);
    }
    cert.gamma1 = g1;
    cert.gamma2 = g2;
    cert.windows_checked = n_windows;
    cert.is_pe = g1 > opts.gamma_floor;
    return cert;
}

PECertificate certify_pe(const Trajectory& trajectory, const LossSpec& psi, int T,
                         const PECertifyOptions& opts) {
    return certify_pe(trajectory.regressors(), psi, T, opts);
}

PECertificate certify_pe_scan(const Trajectory& trajectory, const LossSpec& psi,
                              const std::vector<int>& Ts, const PECertifyOptions& opts) {
    if (Ts.empty()) throw ContractError("certify_pe_scan requires at least one T");
    const auto regressors = trajectory.regressors();
    PECertificate last;
    for (const int T : Ts) {
        last = certify_pe(regressors, psi, T, opts);
        if (last.is_pe) return last;
    }
    return last;
}

nlohmann::json PECertificate::to_json() const {
    return {{"T", T},
            {"gamma1", gamma1},
            {"gamma2", gamma2},
            {"loss", loss.to_json()},
            {"norm", "euclidean"},
            {"method", method == PEMethod::EigenExact ? "eigen_exact" : "sphere_sampling"},
            {"windows_checked", windows_checked},
            {"dim", dim},
            {"gamma_floor", gamma_floor},
            {"is_pe", is_pe}};
}

PECertificate PECertificate::from_json(const nlohmann::json& j) {
    PECertificate c;
    c.T = j.at("T").get<int>();
    c.gamma1 = j.at("gamma1").get<double>();
    c.gamma2 = j.at("gamma2").get<double>();
    c.loss = LossSpec::from_json(j.at("loss"));
    const std::string m = j.at("method").get<std::string>();
    if (m == "eigen_exact")
        c.method = PEMethod::EigenExact;
    else if (m == "sphere_sampling")
        c.method = PEMethod::SphereSampling;
    else
        throw ContractError("unknown PE method: " + m);
    c.windows_checked = j.at("windows_checked").get<int>();
    c.dim = j.value("dim", 0);
    c.gamma_floor = j.value("gamma_floor", 1e-10);
    c.is_pe = j.at("is_pe").get<bool>();
    return c;
}

namespace {

/// c * f_psi(r) as a represented function.
XiFunction gh_lower_form(const LossSpec& psi, double c) {
    switch (psi.kind()) {
    case LossSpec::Kind::Power:
        return XiFunction::power_term(c, psi.param());
    case LossSpec::Kind::Huber:
        // f(s) = min(s, s^2)
        return XiFunction::min_of(
            {XiFunction::power_term(c, 1.0), XiFunction::power_term(c, 2.0)});
    default:
        // quadratic kinds: f(s) = s^2
        return XiFunction::power_term(c, 2.0);
    }
}

/// c / f_psi(1/r) as a represented function (with value 0 at 0).
XiFunction gh_upper_form(const LossSpec& psi, double c) {
    switch (psi.kind()) {
    case LossSpec::Kind::Power:
        return XiFunction::power_term(c, psi.param());
    case LossSpec::Kind::Huber:
        // 1 / min(1/r, 1/r^2) = max(r, r^2)
        return XiFunction::max_of(
            {XiFunction::power_term(c, 1.0), XiFunction::power_term(c, 2.0)});
    default:
        return XiFunction::power_term(c, 2.0);
    }
}

} // namespace

KInfinityPair kinf_from_gamma(const PECertificate& cert) {
    if (!cert.is_pe)
        throw ContractError("certificate is not PE: gamma1 below the floor gives no "
                            "class-K-infinity lower bound");
    return {gh_lower_form(cert.loss, cert.gamma1), gh_upper_form(cert.loss, cert.gamma2)};
}

std::pair<double, double> gamma_from_kinf(const KInfinityPair& pair) {
    return {pair.alpha(1.0), pair.beta(1.0)};
}

} // namespace adapid
