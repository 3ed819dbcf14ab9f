#include "sbreak/functional.hpp"

#include "sbreak/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbreak {

namespace {
constexpr std::string_view kModule = "test_stats";
}

void TestSpec::validate() const {
    if ((functional == Functional::ExpQ || functional == Functional::ExpW) && !(c > 0.0 && std::isfinite(c))) {
        throw Error(ErrorCode::InvalidConfig, kModule, "exponential weight c must be positive");
    }
}

bool TestSpec::same_as(const TestSpec& other) const noexcept {
    if (functional != other.functional) return false;
    if (functional == Functional::ExpQ || functional == Functional::ExpW) return c == other.c;
    return true;
}

std::string TestSpec::describe() const {
    std::ostringstream s;
    s << to_string(functional);
    if (functional == Functional::ExpQ || functional == Functional::ExpW) s << "(c=" << c << ")";
    return s.str();
}

Functional parse_functional(const std::string& name) {
    if (name == "sup") return Functional::Sup;
    if (name == "avg") return Functional::Avg;
    if (name == "expq") return Functional::ExpQ;
    if (name == "expw") return Functional::ExpW;
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown test functional '" + name + "'");
}

std::string to_string(Functional f) {
    switch (f) {
        case Functional::Sup: return "sup";
        case Functional::Avg: return "avg";
        case Functional::ExpQ: return "expq";
        case Functional::ExpW: return "expw";
    }
    return "unknown";
}

double log_mean_exp(const double* a, std::size_t n) {
    if (n == 0) return -INFINITY;
    const double m = *std::max_element(a, a + n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::expm1(a[i] - m);
    return m + std::log1p(acc / static_cast<double>(n));
}

PathMax path_max(const double* q, std::size_t n) {
    PathMax out;
    if (n == 0) return out;
    out.value = q[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (q[i] > out.value) {
            out.value = q[i];
            out.index = i;
        }
    }
    return out;
}

double path_mean(const double* q, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += q[i];
    return acc / static_cast<double>(n);
}

double path_expq(const double* q, std::size_t n, double v, double c) {
    std::vector<double> a(n);
    const double scale = c / std::sqrt(2.0 * v);
    for (std::size_t i = 0; i < n; ++i) a[i] = scale * q[i];
    return std::sqrt(2.0) / c * log_mean_exp(a.data(), n);
}

double path_log_expw(const double* w, std::size_t n, double p, double c) {
    const double a = c / std::sqrt(p);
    const double slope = 0.5 * a / (1.0 + a);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = slope * w[i];
    return -0.5 * p * std::log1p(a) + log_mean_exp(e.data(), n);
}

double quantile_type7(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw Error(ErrorCode::InvalidConfig, kModule, "quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorCode::InvalidConfig, kModule, "probability outside [0,1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void NullDistribution::finalize() {
    std::sort(draws.begin(), draws.end());
    reps = static_cast<long>(draws.size());
}

double NullDistribution::quantile(double prob) const { return quantile_type7(draws, prob); }

double NullDistribution::p_value(double stat) const {
    const auto first_ge = std::lower_bound(draws.begin(), draws.end(), stat);
    const auto count = static_cast<double>(draws.end() - first_ge);
    return (1.0 + count) / (1.0 + static_cast<double>(draws.size()));
}

}  // namespace sbreak
