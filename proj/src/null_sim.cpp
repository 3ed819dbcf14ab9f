#include "sbreak/null_sim.hpp"

#include "sbreak/error.hpp"
#include "sbreak/parallel.hpp"

#include <cmath>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "null_sim";

std::vector<long> grid_indices(long resolution, double gamma_star) {
    std::vector<long> idx;
    const auto lo = static_cast<long>(std::ceil(resolution * gamma_star - 1e-9));
    const auto hi = static_cast<long>(std::floor(resolution * (1.0 - gamma_star) + 1e-9));
    for (long k = std::max(lo, 1L); k <= std::min(hi, resolution - 1); ++k) idx.push_back(k);
    return idx;
}

bool on_lattice(long resolution, double g) {
    const double x = g * static_cast<double>(resolution);
    return std::abs(x - std::round(x)) < 1e-9;
}

double logit(double g) { return std::log(g / (1.0 - g)); }

void require_positive(long v, long minimum, const char* what) {
    if (v < minimum) {
        std::ostringstream msg;
        msg << what << " must be at least " << minimum << " (got " << v << ")";
        throw Error(ErrorCode::InvalidConfig, kModule, msg.str());
    }
}

double evaluate(const TestSpec& spec, const std::vector<double>& q) {
    switch (spec.functional) {
        case Functional::Sup: return path_max(q.data(), q.size()).value;
        case Functional::Avg: return path_mean(q.data(), q.size());
        case Functional::ExpQ: return path_expq(q.data(), q.size(), 1.0, spec.c);
        case Functional::ExpW: break;
    }
    throw Error(ErrorCode::FunctionalMismatch, kModule, "ExpW nulls come from the Bessel process");
}

std::vector<double> lattice_q(const LimitPathConfig& config, const std::vector<double>& gammas, RandomStream& rng) {
    std::vector<long> idx;
    idx.reserve(gammas.size());
    for (double g : gammas) idx.push_back(std::lround(g * static_cast<double>(config.resolution)));
    const WPair pair = config.construction == PathConstruction::WhiteNoise
                           ? simulate_w_pair_white_noise(config.resolution, rng)
                           : simulate_w_pair_ito(config.resolution, rng);
    return q_from_pair(pair, config.resolution, idx);
}

}  // namespace

PathConstruction parse_construction(const std::string& name) {
    if (name == "ou" || name == "gaussian") return PathConstruction::OrnsteinUhlenbeck;
    if (name == "white-noise") return PathConstruction::WhiteNoise;
    if (name == "ito") return PathConstruction::Ito;
    if (name == "pointwise") return PathConstruction::Pointwise;
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown path construction '" + name + "'");
}

std::string to_string(PathConstruction c) {
    switch (c) {
        case PathConstruction::OrnsteinUhlenbeck: return "ou";
        case PathConstruction::WhiteNoise: return "white-noise";
        case PathConstruction::Ito: return "ito";
        case PathConstruction::Pointwise: return "pointwise";
    }
    return "unknown";
}

void LimitPathConfig::validate() const {
    require_positive(resolution, 100, "resolution N");
    require_positive(reps, 100, "reps");
    if (!(gamma_star > 0.0 && gamma_star < 0.5)) {
        throw Error(ErrorCode::InvalidTrim, kModule, "trimming must lie in (0, 0.5)");
    }
}

std::vector<double> limit_grid(long resolution, double gamma_star) {
    std::vector<double> out;
    if (!on_lattice(resolution, gamma_star)) out.push_back(gamma_star);
    for (long k : grid_indices(resolution, gamma_star)) out.push_back(static_cast<double>(k) / resolution);
    if (!on_lattice(resolution, 1.0 - gamma_star)) out.push_back(1.0 - gamma_star);
    return out;
}

WPair simulate_w_pair_white_noise(long resolution, RandomStream& rng) {
    const long n = resolution;
    const double cell_sd = 1.0 / static_cast<double>(n);
    const double diag_sd = cell_sd / std::sqrt(2.0);
    // row_sum[i]: mass of cells with first coordinate in block i.
    std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
    WPair out;
    out.w.assign(static_cast<std::size_t>(n + 1), 0.0);
    out.wbar.assign(static_cast<std::size_t>(n + 1), 0.0);
    const double root2 = std::sqrt(2.0);
    for (long j = 0; j < n; ++j) {
        double col = 0.0;
        for (long i = 0; i < j; ++i) {
            const double z = cell_sd * rng.normal();
            col += z;
            row_sum[static_cast<std::size_t>(i)] += z;
        }
        const double d = diag_sd * rng.normal();
        col += d;
        row_sum[static_cast<std::size_t>(j)] += d;
        out.w[static_cast<std::size_t>(j + 1)] = out.w[static_cast<std::size_t>(j)] + root2 * col;
    }
    for (long k = n - 1; k >= 0; --k) {
        out.wbar[static_cast<std::size_t>(k)] =
            out.wbar[static_cast<std::size_t>(k + 1)] + root2 * row_sum[static_cast<std::size_t>(k)];
    }
    return out;
}

WPair simulate_w_pair_ito(long resolution, RandomStream& rng) {
    const long n = resolution;
    const double sd = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> b(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> term(static_cast<std::size_t>(n + 1), 0.0);
    for (long j = 1; j <= n; ++j) {
        const double db = sd * rng.normal();
        term[static_cast<std::size_t>(j)] = b[static_cast<std::size_t>(j - 1)] * db;
        b[static_cast<std::size_t>(j)] = b[static_cast<std::size_t>(j - 1)] + db;
    }
    const double root2 = std::sqrt(2.0);
    WPair out;
    out.w.assign(static_cast<std::size_t>(n + 1), 0.0);
    out.wbar.assign(static_cast<std::size_t>(n + 1), 0.0);
    double prefix = 0.0;
    for (long k = 1; k <= n; ++k) {
        prefix += term[static_cast<std::size_t>(k)];
        out.w[static_cast<std::size_t>(k)] = root2 * prefix;
    }
    double suffix = 0.0;
    const double b1 = b[static_cast<std::size_t>(n)];
    for (long k = n; k >= 0; --k) {
        const double bk = b[static_cast<std::size_t>(k)];
        out.wbar[static_cast<std::size_t>(k)] = root2 * (suffix - bk * (b1 - bk));
        suffix += term[static_cast<std::size_t>(k)];
    }
    return out;
}

std::vector<double> q_from_pair(const WPair& pair, long resolution, const std::vector<long>& indices) {
    std::vector<double> q;
    q.reserve(indices.size());
    const double w1 = pair.w.back();
    for (long k : indices) {
        if (k <= 0 || k >= resolution) throw Error(ErrorCode::InvalidTrim, kModule, "grid index outside (0, N)");
        const double g = static_cast<double>(k) / static_cast<double>(resolution);
        const auto s = static_cast<std::size_t>(k);
        q.push_back(pair.w[s] / g + pair.wbar[s] / (1.0 - g) - w1);
    }
    return q;
}

std::vector<double> simulate_q_ou(const std::vector<double>& gammas, RandomStream& rng) {
    std::vector<double> q(gammas.size());
    if (gammas.empty()) return q;
    q[0] = rng.normal();
    for (std::size_t i = 1; i < gammas.size(); ++i) {
        const double r = std::exp(-(logit(gammas[i]) - logit(gammas[i - 1])));
        q[i] = r * q[i - 1] + std::sqrt(1.0 - r * r) * rng.normal();
    }
    return q;
}

std::vector<double> simulate_q_path(const LimitPathConfig& config, RandomStream& rng) {
    const std::vector<double> gammas = limit_grid(config.resolution, config.gamma_star);
    switch (config.construction) {
        case PathConstruction::OrnsteinUhlenbeck: return simulate_q_ou(gammas, rng);
        case PathConstruction::Pointwise: {
            std::vector<double> q(gammas.size());
            for (double& v : q) v = rng.normal();
            return q;
        }
        case PathConstruction::WhiteNoise:
        case PathConstruction::Ito: {
            for (double g : gammas) {
                if (!on_lattice(config.resolution, g)) {
                    throw Error(ErrorCode::InvalidConfig, kModule,
                                "lattice constructions need gamma_star * N to be an integer");
                }
            }
            return lattice_q(config, gammas, rng);
        }
    }
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown path construction");
}

std::vector<NullDistribution> simulate_null(const LimitPathConfig& config, const std::vector<TestSpec>& specs) {
    config.validate();
    for (const auto& s : specs) {
        s.validate();
        if (s.functional == Functional::ExpW) {
            throw Error(ErrorCode::FunctionalMismatch, kModule, "ExpW nulls come from the Bessel process");
        }
    }
    const auto reps = static_cast<std::size_t>(config.reps);
    std::vector<std::vector<double>> draws(specs.size(), std::vector<double>(reps));
    parallel_for(reps, config.threads, [&](std::size_t r) {
        RandomStream rng(config.seed, r);
        const std::vector<double> q = simulate_q_path(config, rng);
        for (std::size_t s = 0; s < specs.size(); ++s) draws[s][r] = evaluate(specs[s], q);
    });
    std::vector<NullDistribution> out;
    out.reserve(specs.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
        NullDistribution d;
        d.spec = specs[s];
        d.gamma_star = config.gamma_star;
        d.resolution = config.resolution;
        d.seed = config.seed;
        d.construction = to_string(config.construction);
        d.draws = std::move(draws[s]);
        d.finalize();
        out.push_back(std::move(d));
    }
    return out;
}

NullDistribution critical_values(const LimitPathConfig& config, const TestSpec& spec) {
    return std::move(simulate_null(config, {spec}).front());
}

CriticalValueTable critical_value_table(const std::vector<double>& gamma_stars, const std::vector<double>& levels,
                                        LimitPathConfig config) {
    std::vector<CvRow> rows;
    for (double g : gamma_stars) {
        config.gamma_star = g;
        const auto nulls = simulate_null(config, {TestSpec::sup(), TestSpec::avg()});
        for (double a : levels) rows.push_back({g, a, nulls[0].critical_value(a), nulls[1].critical_value(a)});
    }
    return CriticalValueTable(std::move(rows));
}

std::vector<double> simulate_bessel_path(long p, const std::vector<double>& gammas, RandomStream& rng) {
    const std::size_t m = gammas.size();
    std::vector<double> out(m, 0.0);
    std::vector<double> b(m);
    for (long d = 0; d < p; ++d) {
        double prev_g = 0.0;
        double prev_b = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            prev_b += std::sqrt(gammas[i] - prev_g) * rng.normal();
            prev_g = gammas[i];
            b[i] = prev_b;
        }
        const double b1 = prev_b + std::sqrt(1.0 - prev_g) * rng.normal();
        for (std::size_t i = 0; i < m; ++i) {
            const double bridge = b[i] - gammas[i] * b1;
            out[i] += bridge * bridge;
        }
    }
    for (std::size_t i = 0; i < m; ++i) out[i] /= gammas[i] * (1.0 - gammas[i]);
    return out;
}

namespace {

NullDistribution bessel_functional(const BesselConfig& config, double gamma_star, const TestSpec& spec,
                                   bool standardized) {
    require_positive(config.p, 1, "p");
    require_positive(config.reps, 100, "reps");
    require_positive(config.resolution, 2, "resolution N");
    if (!(gamma_star > 0.0 && gamma_star < 0.5)) {
        throw Error(ErrorCode::InvalidTrim, kModule, "trimming must lie in (0, 0.5)");
    }
    const std::vector<double> gammas = limit_grid(config.resolution, gamma_star);
    const double p = static_cast<double>(config.p);
    NullDistribution d;
    d.spec = spec;
    d.gamma_star = gamma_star;
    d.p = config.p;
    d.resolution = config.resolution;
    d.seed = config.seed;
    d.construction = "bessel";
    d.draws.resize(static_cast<std::size_t>(config.reps));
    parallel_for(d.draws.size(), config.threads, [&](std::size_t r) {
        RandomStream rng(config.seed, r);
        std::vector<double> w = simulate_bessel_path(config.p, gammas, rng);
        if (spec.functional == Functional::ExpW) {
            d.draws[r] = path_log_expw(w.data(), w.size(), p, spec.c);
            return;
        }
        if (standardized) {
            for (double& v : w) v = (v - p) / std::sqrt(2.0 * p);
        }
        d.draws[r] = path_max(w.data(), w.size()).value;
    });
    d.finalize();
    return d;
}

}  // namespace

NullDistribution simulate_bessel_sup(const BesselConfig& config, double gamma_star, bool standardized) {
    return bessel_functional(config, gamma_star, TestSpec::sup(), standardized);
}

NullDistribution simulate_expw_null(const BesselConfig& config, double gamma_star, double c) {
    const TestSpec spec = TestSpec::expw(c);
    spec.validate();
    return bessel_functional(config, gamma_star, spec, false);
}

double andrews_transform(double c_fixed_p, long p, double v_hat) {
    if (p < 1 || !(v_hat > 0.0)) throw Error(ErrorCode::InvalidConfig, kModule, "need p >= 1 and v > 0");
    return (c_fixed_p - static_cast<double>(p)) * std::sqrt(v_hat / (2.0 * static_cast<double>(p)));
}

double andrews_inverse(double c_star, long p, double v_hat) {
    if (p < 1 || !(v_hat > 0.0)) throw Error(ErrorCode::InvalidConfig, kModule, "need p >= 1 and v > 0");
    return c_star * std::sqrt(2.0 * static_cast<double>(p) / v_hat) + static_cast<double>(p);
}

}  // namespace sbreak
