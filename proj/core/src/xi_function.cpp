#include "adapid/xi_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapid/errors.hpp"

namespace adapid {

XiFunction XiFunction::power_term(double c, double p) {
    if (!(c > 0.0) || !(p > 0.0))
        throw ContractError("XiFunction::power_term requires c > 0 and p > 0");
    XiFunction f;
    f.kind_ = Kind::PowerTerm;
    f.c_ = c;
    f.p_ = p;
    return f;
}

namespace {
void require_terms(const std::vector<XiFunction>& terms) {
    if (terms.empty())
        throw ContractError("composite XiFunction requires at least one term");
}
} // namespace

XiFunction XiFunction::min_of(std::vector<XiFunction> terms) {
    require_terms(terms);
    if (terms.size() == 1) return std::move(terms.front());
    XiFunction f;
    f.kind_ = Kind::MinOf;
    f.terms_ = std::move(terms);
    return f;
}

XiFunction XiFunction::max_of(std::vector<XiFunction> terms) {
    require_terms(terms);
    if (terms.size() == 1) return std::move(terms.front());
    XiFunction f;
    f.kind_ = Kind::MaxOf;
    f.terms_ = std::move(terms);
    return f;
}

XiFunction XiFunction::sum_of(std::vector<XiFunction> terms) {
    require_terms(terms);
    if (terms.size() == 1) return std::move(terms.front());
    XiFunction f;
    f.kind_ = Kind::SumOf;
    f.terms_ = std::move(terms);
    return f;
}

XiFunction XiFunction::tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw ContractError("XiFunction::tabulated requires matching grids with >= 2 knots");
    if (grid.front() != 0.0 || values.front() != 0.0)
        throw ContractError("XiFunction::tabulated must start at (0, 0)");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1]) || !(values[i] > values[i - 1]))
            throw ContractError("XiFunction::tabulated knots must be strictly increasing");
    }
    XiFunction f;
    f.kind_ = Kind::Tabulated;
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    return f;
}

namespace {

XiFunction make_composite(XiFunction::Kind kind, std::vector<XiFunction> terms) {
    if (terms.empty())
        throw ContractError("composite XiFunction requires at least one term");
    if (terms.size() == 1) return std::move(terms.front());
    // Flatten through JSON re-parse would be wasteful; build via from_json shape.
    nlohmann::json j;
    switch (kind) {
    case XiFunction::Kind::MinOf: j["type"] = "min_of"; break;
    case XiFunction::Kind::MaxOf: j["type"] = "max_of"; break;
    case XiFunction::Kind::SumOf: j["type"] = "sum_of"; break;
    default: throw ContractError("make_composite: not a composite kind");
    }
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms) j["terms"].push_back(t.to_json());
    return XiFunction::from_json(j);
}

} // namespace

double XiFunction::operator()(double r) const {
    if (r < 0.0) throw ContractError("XiFunction evaluated at negative argument");
    switch (kind_) {
    case Kind::PowerTerm:
        return c_ * std::pow(r, p_);
    case Kind::MinOf: {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& t : terms_) v = std::min(v, t(r));
        return v;
    }
    case Kind::MaxOf: {
        double v = 0.0;
        for (const auto& t : terms_) v = std::max(v, t(r));
        return v;
    }
    case Kind::SumOf: {
        double v = 0.0;
        for (const auto& t : terms_) v += t(r);
        return v;
    }
    case Kind::Tabulated: {
        if (r >= grid_.back()) {
            // linear extrapolation with the last segment's slope
            const std::size_t m = grid_.size();
            const double slope =
                (values_[m - 1] - values_[m - 2]) / (grid_[m - 1] - grid_[m - 2]);
            return values_.back() + slope * (r - grid_.back());
        }
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
        if (i == 0) return values_.front();
        const double w = (r - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
        return values_[i - 1] + w * (values_[i] - values_[i - 1]);
    }
    }
    return 0.0;
}

double XiFunction::inverse(double y) const {
    if (y < 0.0) throw ContractError("XiFunction::inverse requires y >= 0");
    if (y == 0.0) return 0.0;
    switch (kind_) {
    case Kind::PowerTerm:
        return std::pow(y / c_, 1.0 / p_);
    case Kind::MinOf: {
        // min of increasing functions inverts to max of the inverses
        double r = 0.0;
        for (const auto& t : terms_) r = std::max(r, t.inverse(y));
        return r;
    }
    case Kind::MaxOf: {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& t : terms_) r = std::min(r, t.inverse(y));
        return r;
    }
    case Kind::SumOf:
        return invert_by_bisection(y);
    case Kind::Tabulated: {
        if (y >= values_.back()) {
            const std::size_t m = grid_.size();
            const double slope =
                (values_[m - 1] - values_[m - 2]) / (grid_[m - 1] - grid_[m - 2]);
            return grid_.back() + (y - values_.back()) / slope;
        }
        const auto it = std::upper_bound(values_.begin(), values_.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - values_.begin());
        if (i == 0) return grid_.front();
        const double w = (y - values_[i - 1]) / (values_[i] - values_[i - 1]);
        return grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
    }
    }
    return 0.0;
}

double XiFunction::invert_by_bisection(double y) const {
    const double tol = 1e-10 * std::max(1.0, y);
    // bracket by doubling
    double hi = 1.0;
    int guard = 0;
    while ((*this)(hi) < y) {
        hi *= 2.0;
        if (++guard > 2048) throw SolverError("XiFunction::inverse failed to bracket");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double v = (*this)(mid);
        if (std::abs(v - y) <= tol) return mid;
        (v < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

XiFunction XiFunction::scaled(double c) const {
    if (!(c > 0.0)) throw ContractError("XiFunction::scaled requires c > 0");
    XiFunction f = *this;
    switch (kind_) {
    case Kind::PowerTerm:
        f.c_ *= c;
        break;
    case Kind::MinOf:
    case Kind::MaxOf:
    case Kind::SumOf:
        for (auto& t : f.terms_) t = t.scaled(c);
        break;
    case Kind::Tabulated:
        for (auto& v : f.values_) v *= c;
        break;
    }
    return f;
}

bool XiFunction::verify_kinf() const {
    if ((*this)(0.0) != 0.0) return false;
    double prev = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double r = std::pow(10.0, -6.0 + 12.0 * i / 63.0);
        const double v = (*this)(r);
        if (!std::isfinite(v) || !(v > prev)) return false;
        prev = v;
    }
    return true;
}

nlohmann::json XiFunction::to_json() const {
    nlohmann::json j;
    switch (kind_) {
    case Kind::PowerTerm:
        j["type"] = "power_term";
        j["c"] = c_;
        j["p"] = p_;
        break;
    case Kind::MinOf:
    case Kind::MaxOf:
    case Kind::SumOf:
        j["type"] = kind_ == Kind::MinOf ? "min_of"
                  : kind_ == Kind::MaxOf ? "max_of"
                                         : "sum_of";
        j["terms"] = nlohmann::json::array();
        for (const auto& t : terms_) j["terms"].push_back(t.to_json());
        break;
    case Kind::Tabulated:
        j["type"] = "tabulated";
        j["grid"] = grid_;
        j["values"] = values_;
        break;
    }
    return j;
}

XiFunction XiFunction::from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "power_term")
        return power_term(j.at("c").get<double>(), j.at("p").get<double>());
    if (type == "tabulated")
        return tabulated(j.at("grid").get<std::vector<double>>(),
                         j.at("values").get<std::vector<double>>());
    if (type == "min_of" || type == "max_of" || type == "sum_of") {
        std::vector<XiFunction> terms;
        for (const auto& tj : j.at("terms")) terms.push_back(from_json(tj));
        if (type == "min_of") return min_of(std::move(terms));
        if (type == "max_of") return max_of(std::move(terms));
        return sum_of(std::move(terms));
    }
    throw ContractError("unknown XiFunction type: " + type);
}

} // namespace adapid
