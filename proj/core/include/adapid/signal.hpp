#ifndef ADAPID_SIGNAL_HPP
#define ADAPID_SIGNAL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace adapid {

/// Regressor stream generators. RotatingBasis cycles e_1..e_n and is
/// persistently exciting with window n; ConstantDirection repeats one vector
/// and is non-exciting by construction.
struct RegressorGen {
    enum class Kind { IidUniform, RotatingBasis, SinusoidBank, ConstantDirection, Custom };
    Kind kind = Kind::IidUniform;
    double low = -1.0, high = 1.0;          // IidUniform
    std::vector<double> frequencies;        // SinusoidBank (cycles per step)
    Eigen::VectorXd direction;              // ConstantDirection
    std::filesystem::path path;             // Custom: CSV with columns x_1..x_n

    static RegressorGen iid_uniform(double low, double high);
    static RegressorGen rotating_basis();
    static RegressorGen sinusoid_bank(std::vector<double> frequencies);
    static RegressorGen constant_direction(Eigen::VectorXd v);
    static RegressorGen custom(std::filesystem::path csv);

    nlohmann::json to_json() const;
    static RegressorGen from_json(const nlohmann::json& j);
};

struct NoiseModel {
    enum class Kind { None, UniformBounded, GaussianClipped };
    Kind kind = Kind::None;
    double v_bar = 0.0;   // UniformBounded: |v| <= v_bar
    double sigma = 0.0;   // GaussianClipped
    double clip = 0.0;    // GaussianClipped: |v| <= clip

    static NoiseModel none();
    static NoiseModel uniform_bounded(double v_bar);
    static NoiseModel gaussian_clipped(double sigma, double clip);

    /// Known worst-case bound on |v_t| (0 for None, v_bar, clip).
    double bound() const;

    nlohmann::json to_json() const;
    static NoiseModel from_json(const nlohmann::json& j);
};

struct SystemConfig {
    Eigen::VectorXd theta_true;
    RegressorGen regressor;
    NoiseModel noise;
    int horizon = 1;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(theta_true.size()); }
    void validate() const;

    nlohmann::json to_json() const;
    static SystemConfig from_json(const nlohmann::json& j);
};

struct TrajectoryRecord {
    int t = 0;            // 1-based, consecutive
    Eigen::VectorXd x;
    double y = 0.0;
    double v = 0.0;       // meaningful only when the trajectory has known noise
};

/// Time-indexed data y_t = x_t' theta + v_t. Ingested trajectories may lack
/// the noise column and the true parameter.
struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::optional<Eigen::VectorXd> theta_true;
    bool noise_known = true;

    int dim() const { return records.empty() ? 0 : static_cast<int>(records.front().x.size()); }
    int length() const { return static_cast<int>(records.size()); }
    std::vector<Eigen::VectorXd> regressors() const;
    std::vector<double> noise_values() const;
};

/// Simulate the linear system for config.horizon steps. Deterministic given
/// the seed.
Trajectory generate_trajectory(const SystemConfig& config);

/// Read a trajectory from CSV with header `t,x_1,...,x_n,y[,v]`.
Trajectory ingest_trajectory(const std::filesystem::path& path);

/// Write CSV in the ingest format, 17 significant digits (exact double
/// round trip). The noise column is emitted only when it is known.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

} // namespace adapid

#endif
