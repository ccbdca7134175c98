#include "adapid/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "adapid/errors.hpp"
#include "adapid/rng.hpp"
#include "csv_util.hpp"

namespace adapid {

RegressorGen RegressorGen::iid_uniform(double low, double high) {
    if (!(low < high)) throw ContractError("IidUniform requires low < high");
    RegressorGen g;
    g.kind = Kind::IidUniform;
    g.low = low;
    g.high = high;
    return g;
}

RegressorGen RegressorGen::rotating_basis() {
    RegressorGen g;
    g.kind = Kind::RotatingBasis;
    return g;
}

RegressorGen RegressorGen::sinusoid_bank(std::vector<double> frequencies) {
    if (frequencies.empty()) throw ContractError("SinusoidBank requires at least one frequency");
    RegressorGen g;
    g.kind = Kind::SinusoidBank;
    g.frequencies = std::move(frequencies);
    return g;
}

RegressorGen RegressorGen::constant_direction(Eigen::VectorXd v) {
    if (v.size() < 1) throw ContractError("ConstantDirection requires a nonempty vector");
    RegressorGen g;
    g.kind = Kind::ConstantDirection;
    g.direction = std::move(v);
    return g;
}

RegressorGen RegressorGen::custom(std::filesystem::path csv) {
    RegressorGen g;
    g.kind = Kind::Custom;
    g.path = std::move(csv);
    return g;
}

nlohmann::json RegressorGen::to_json() const {
    switch (kind) {
    case Kind::IidUniform:
        return {{"kind", "iid_uniform"}, {"low", low}, {"high", high}};
    case Kind::RotatingBasis:
        return {{"kind", "rotating_basis"}};
    case Kind::SinusoidBank:
        return {{"kind", "sinusoid_bank"}, {"frequencies", frequencies}};
    case Kind::ConstantDirection: {
        std::vector<double> v(direction.data(), direction.data() + direction.size());
        return {{"kind", "constant_direction"}, {"v", v}};
    }
    case Kind::Custom:
        return {{"kind", "custom"}, {"path", path.string()}};
    }
    return {};
}

RegressorGen RegressorGen::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid_uniform")
        return iid_uniform(j.value("low", -1.0), j.value("high", 1.0));
    if (kind == "rotating_basis") return rotating_basis();
    if (kind == "sinusoid_bank")
        return sinusoid_bank(j.at("frequencies").get<std::vector<double>>());
    if (kind == "constant_direction") {
        const auto v = j.at("v").get<std::vector<double>>();
        return constant_direction(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                                    static_cast<long>(v.size())));
    }
    if (kind == "custom") return custom(j.at("path").get<std::string>());
    throw ContractError("unknown regressor kind: " + kind);
}

NoiseModel NoiseModel::none() { return NoiseModel{}; }

NoiseModel NoiseModel::uniform_bounded(double v_bar) {
    if (v_bar < 0.0) throw ContractError("UniformBounded requires v_bar >= 0");
    NoiseModel m;
    m.kind = Kind::UniformBounded;
    m.v_bar = v_bar;
    return m;
}

NoiseModel NoiseModel::gaussian_clipped(double sigma, double clip) {
    if (!(sigma >= 0.0) || !(clip >= 0.0))
        throw ContractError("GaussianClipped requires sigma >= 0 and clip >= 0");
    NoiseModel m;
    m.kind = Kind::GaussianClipped;
    m.sigma = sigma;
    m.clip = clip;
    return m;
}

double NoiseModel::bound() const {
    switch (kind) {
    case Kind::None: return 0.0;
    case Kind::UniformBounded: return v_bar;
    case Kind::GaussianClipped: return clip;
    }
    return 0.0;
}

nlohmann::json NoiseModel::to_json() const {
    switch (kind) {
    case Kind::None:
        return {{"kind", "none"}};
    case Kind::UniformBounded:
        return {{"kind", "uniform_bounded"}, {"v_bar", v_bar}};
    case Kind::GaussianClipped:
        return {{"kind", "gaussian_clipped"}, {"sigma", sigma}, {"clip", clip}};
    }
    return {};
}

NoiseModel NoiseModel::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return none();
    if (kind == "uniform_bounded") return uniform_bounded(j.at("v_bar").get<double>());
    if (kind == "gaussian_clipped")
        return gaussian_clipped(j.at("sigma").get<double>(), j.at("clip").get<double>());
    throw ContractError("unknown noise kind: " + kind);
}

void SystemConfig::validate() const {
    if (theta_true.size() < 1) throw ContractError("SystemConfig requires n >= 1");
    if (horizon < 1) throw ContractError("SystemConfig requires horizon >= 1");
    if (regressor.kind == RegressorGen::Kind::ConstantDirection &&
        regressor.direction.size() != theta_true.size())
        throw ContractError("ConstantDirection dimension does not match theta_true");
}

nlohmann::json SystemConfig::to_json() const {
    std::vector<double> th(theta_true.data(), theta_true.data() + theta_true.size());
    return {{"theta_true", th},
            {"regressor", regressor.to_json()},
            {"noise", noise.to_json()},
            {"horizon", horizon},
            {"seed", seed}};
}

SystemConfig SystemConfig::from_json(const nlohmann::json& j) {
    SystemConfig c;
    const auto th = j.at("theta_true").get<std::vector<double>>();
    c.theta_true = Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<long>(th.size()));
    c.regressor = RegressorGen::from_json(j.at("regressor"));
    c.noise = j.contains("noise") ? NoiseModel::from_json(j.at("noise")) : NoiseModel::none();
    c.horizon = j.at("horizon").get<int>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.validate();
    return c;
}

std::vector<Eigen::VectorXd> Trajectory::regressors() const {
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(records.size());
    for (const auto& r : records) xs.push_back(r.x);
    return xs;
}

std::vector<double> Trajectory::noise_values() const {
    std::vector<double> vs;
    vs.reserve(records.size());
    for (const auto& r : records) vs.push_back(r.v);
    return vs;
}

namespace {

std::vector<Eigen::VectorXd> load_custom_regressors(const std::filesystem::path& path, int n,
                                                    int horizon) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open regressor file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty regressor file: " + path.string());
    std::vector<Eigen::VectorXd> xs;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (static_cast<int>(cells.size()) != n)
            throw IoError("regressor file row " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " columns, expected " +
                          std::to_string(n));
        Eigen::VectorXd x(n);
        for (int c = 0; c < n; ++c) x[c] = detail::parse_double(cells[static_cast<std::size_t>(c)], row, c + 1);
        xs.push_back(std::move(x));
    }
    if (static_cast<int>(xs.size()) < horizon)
        throw IoError("regressor file provides " + std::to_string(xs.size()) +
                      " rows, horizon needs " + std::to_string(horizon));
    return xs;
}

} // namespace

Trajectory generate_trajectory(const SystemConfig& config) {
    config.validate();
    const int n = config.dim();
    Rng rng(config.seed);

    // phases for the sinusoid bank are fixed by the seed before the noise draws
    std::vector<double> phases;
    if (config.regressor.kind == RegressorGen::Kind::SinusoidBank) {
        phases.resize(static_cast<std::size_t>(n));
        for (auto& p : phases) p = rng.uniform(0.0, 2.0 * M_PI);
    }
    std::vector<Eigen::VectorXd> custom;
    if (config.regressor.kind == RegressorGen::Kind::Custom)
        custom = load_custom_regressors(config.regressor.path, n, config.horizon);

    Trajectory traj;
    traj.theta_true = config.theta_true;
    traj.noise_known = true;
    traj.records.reserve(static_cast<std::size_t>(config.horizon));

    for (int t = 1; t <= config.horizon; ++t) {
        TrajectoryRecord rec;
        rec.t = t;
        switch (config.regressor.kind) {
        case RegressorGen::Kind::IidUniform:
            rec.x = rng.uniform_vector(n, config.regressor.low, config.regressor.high);
            break;
        case RegressorGen::Kind::RotatingBasis:
            rec.x = Eigen::VectorXd::Unit(n, (t - 1) % n);
            break;
        case RegressorGen::Kind::SinusoidBank: {
            rec.x.resize(n);
            const auto& fs = config.regressor.frequencies;
            for (int i = 0; i < n; ++i) {
                const double f = fs[static_cast<std::size_t>(i) % fs.size()];
                rec.x[i] = std::sin(2.0 * M_PI * f * t + phases[static_cast<std::size_t>(i)]);
            }
            break;
        }
        case RegressorGen::Kind::ConstantDirection:
            rec.x = config.regressor.direction;
            break;
        case RegressorGen::Kind::Custom:
            rec.x = custom[static_cast<std::size_t>(t - 1)];
            break;
        }

        switch (config.noise.kind) {
        case NoiseModel::Kind::None:
            rec.v = 0.0;
            break;
        case NoiseModel::Kind::UniformBounded:
            rec.v = rng.uniform(-config.noise.v_bar, config.noise.v_bar);
            break;
        case NoiseModel::Kind::GaussianClipped:
            rec.v = std::clamp(config.noise.sigma * rng.gaussian(), -config.noise.clip,
                               config.noise.clip);
            break;
        }

        rec.y = rec.x.dot(config.theta_true) + rec.v;
        traj.records.push_back(std::move(rec));
    }
    return traj;
}

Trajectory ingest_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trajectory file: " + path.string());

    const auto header = detail::split_csv_line(line);
    // header: t,x_1,...,x_n,y[,v]
    if (header.size() < 3 || header[0] != "t")
        throw IoError("bad trajectory header (want t,x_1,...,x_n,y[,v]): " + line);
    int n = 0;
    std::size_t col = 1;
    while (col < header.size() && header[col] == "x_" + std::to_string(n + 1)) {
        ++n;
        ++col;
    }
    if (n == 0 || col >= header.size() || header[col] != "y")
        throw IoError("bad trajectory header (want t,x_1,...,x_n,y[,v]): " + line);
    ++col;
    bool has_v = false;
    if (col < header.size()) {
        if (header[col] != "v" || col + 1 != header.size())
            throw IoError("bad trajectory header (want t,x_1,...,x_n,y[,v]): " + line);
        has_v = true;
    }

    Trajectory traj;
    traj.noise_known = has_v;
    const std::size_t want_cols = 2 + static_cast<std::size_t>(n) + (has_v ? 1 : 0);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != want_cols)
            throw IoError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                          " columns, expected " + std::to_string(want_cols));
        TrajectoryRecord rec;
        rec.t = static_cast<int>(detail::parse_int(cells[0], row, 1));
        const int expected_t = static_cast<int>(traj.records.size()) + 1;
        if (rec.t != expected_t)
            throw IoError("non-consecutive timestamp " + std::to_string(rec.t) + " at row " +
                          std::to_string(row) + " (expected " + std::to_string(expected_t) + ")");
        rec.x.resize(n);
        for (int c = 0; c < n; ++c)
            rec.x[c] = detail::parse_double(cells[static_cast<std::size_t>(c) + 1], row, c + 2);
        rec.y = detail::parse_double(cells[static_cast<std::size_t>(n) + 1], row, n + 2);
        rec.v = has_v ? detail::parse_double(cells[static_cast<std::size_t>(n) + 2], row, n + 3) : 0.0;
        traj.records.push_back(std::move(rec));
    }
    if (traj.records.empty()) throw IoError("no records in trajectory file: " + path.string());
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    if (traj.records.empty()) throw ContractError("cannot write an empty trajectory");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trajectory file: " + path.string());
    const int n = traj.dim();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x_" << i;
    out << ",y";
    if (traj.noise_known) out << ",v";
    out << "\n";
    for (const auto& rec : traj.records) {
        out << rec.t;
        for (int i = 0; i < n; ++i) out << "," << detail::format_double(rec.x[i]);
        out << "," << detail::format_double(rec.y);
        if (traj.noise_known) out << "," << detail::format_double(rec.v);
        out << "\n";
    }
}

} // namespace adapid
