#include "sbreak/montecarlo.hpp"

#include "sbreak/error.hpp"
#include "sbreak/parallel.hpp"
#include "sbreak/test_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "montecarlo";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

struct RhoParams {
    double rho = 0.0;
    Index p = 20;
};

RhoParams parse_rho(const std::string& name) {
    // RHO:<rho>:<p>
    const std::size_t a = name.find(':');
    const std::size_t b = name.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw Error(ErrorCode::CatalogUnknown, kModule, "expected RHO:<rho>:<p>, got '" + name + "'");
    }
    RhoParams out;
    try {
        out.rho = std::stod(name.substr(a + 1, b - a - 1));
        out.p = std::stol(name.substr(b + 1));
    } catch (const std::exception&) {
        throw Error(ErrorCode::CatalogUnknown, kModule, "cannot parse '" + name + "'");
    }
    if (out.p < 2) throw Error(ErrorCode::CatalogUnknown, kModule, "RHO design needs p >= 2");
    return out;
}

int catalog_index(const std::string& name, const std::string& prefix, int lo, int hi) {
    if (!starts_with(name, prefix) || name.size() != prefix.size() + 1) return -1;
    const int d = name[prefix.size()] - '0';
    return (d >= lo && d <= hi) ? d : -1;
}

double loglog(double v) { return std::log(std::log(v)); }

// Shared building blocks of DGP1-7 at one observation.
struct SieveMeans {
    double a;  // exp(0.15 z'alpha)
    double l;  // log log(z'alpha)
    double b;  // 1 + 0.3(z2^-2 + z3^-1/2)
    double c;  // 1 + 0.5(sin z2 + cos z3)
};

SieveMeans sieve_means(double z2, double z3) {
    const double lin = 2.0 + 2.0 * z2 + 2.0 * z3;
    return {std::exp(0.15 * lin), loglog(lin), 1.0 + 0.3 * (1.0 / (z2 * z2) + 1.0 / std::sqrt(z3)),
            1.0 + 0.5 * (std::sin(z2) + std::cos(z3))};
}

double ma24(const VectorXd& v, Index t) {
    // v is offset by 24 presample draws.
    double y = 0.5;
    for (int j = 1; j <= 6; ++j) y += (0.9 - j / 10.0) * v(t + 24 - j);
    for (int j = 7; j <= 24; ++j) y += 0.2 * v(t + 24 - j);
    return y;
}

std::string failure_name(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
    return "Other";
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

InnovationSpec InnovationSpec::iid() {
    InnovationSpec s;
    s.kind = InnovationKind::IidNormal;
    s.alpha = 0.0;
    return s;
}

InnovationSpec InnovationSpec::arch1(double omega, double alpha) {
    InnovationSpec s;
    s.kind = InnovationKind::Arch1;
    s.omega = omega;
    s.alpha = alpha;
    s.beta = 0.0;
    return s;
}

InnovationSpec InnovationSpec::garch11(double omega, double alpha, double beta) {
    InnovationSpec s;
    s.kind = InnovationKind::Garch11;
    s.omega = omega;
    s.alpha = alpha;
    s.beta = beta;
    return s;
}

void InnovationSpec::validate() const {
    if (kind == InnovationKind::IidNormal) return;
    if (!(omega > 0.0) || alpha < 0.0 || beta < 0.0 || !(alpha + beta < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, kModule, "innovation parameters violate stationarity");
    }
    if (burn_in < 0) throw Error(ErrorCode::InvalidConfig, kModule, "burn-in must be >= 0");
}

double InnovationSpec::unconditional_variance() const noexcept {
    if (kind == InnovationKind::IidNormal) return 1.0;
    return omega / (1.0 - alpha - (kind == InnovationKind::Garch11 ? beta : 0.0));
}

std::string InnovationSpec::describe() const {
    switch (kind) {
        case InnovationKind::IidNormal: return "iid";
        case InnovationKind::Arch1: return "arch(" + fmt_short(omega) + "," + fmt_short(alpha) + ")";
        case InnovationKind::Garch11:
            return "garch(" + fmt_short(omega) + "," + fmt_short(alpha) + "," + fmt_short(beta) + ")";
    }
    return "unknown";
}

InnovationSpec parse_innovation(const std::string& name) {
    if (name == "iid") return InnovationSpec::iid();
    if (name == "arch") return InnovationSpec::arch1();
    if (name == "garch") return InnovationSpec::garch11();
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown innovation '" + name + "' (iid, arch, garch)");
}

MatrixXd gen_covariates(Index n, RandomStream& rng) {
    MatrixXd z(n, 2);
    for (Index t = 0; t < n; ++t) {
        const double w1 = rng.uniform(0.0, 5.0);
        const double w2 = rng.uniform(0.0, 5.0);
        const double w3 = rng.uniform(0.0, 5.0);
        z(t, 0) = 0.5 * (w1 + w2);
        z(t, 1) = 0.5 * (w1 + w3);
    }
    return z;
}

VectorXd gen_innovations(const InnovationSpec& spec, Index n, RandomStream& rng) {
    spec.validate();
    VectorXd v(n);
    if (spec.kind == InnovationKind::IidNormal) {
        for (Index t = 0; t < n; ++t) v(t) = rng.normal();
        return v;
    }
    const double beta = spec.kind == InnovationKind::Garch11 ? spec.beta : 0.0;
    double s2 = spec.unconditional_variance();
    double prev = 0.0;
    for (Index t = -static_cast<Index>(spec.burn_in); t < n; ++t) {
        const double e = std::sqrt(s2) * rng.normal();
        if (t >= 0) v(t) = e;
        prev = e;
        s2 = spec.omega + spec.alpha * prev * prev + beta * s2;
    }
    return v;
}

void DgpSpec::validate() const {
    innovation.validate();
    if (n < 10) throw Error(ErrorCode::SampleTooShort, kModule, "sample size must be at least 10");
}

SimulatedSample gen_dgp(const DgpSpec& spec, RandomStream& rng) {
    spec.validate();
    const Index n = spec.n;
    const Index half = n / 2;
    const Index third = n / 3;
    const Index two_third = 2 * n / 3;
    const double dn = static_cast<double>(n);
    SimulatedSample out;

    if (const int d = catalog_index(spec.name, "DGP", 1, 7); d > 0) {
        const MatrixXd z = gen_covariates(n, rng);
        const VectorXd v = gen_innovations(spec.innovation, n, rng);
        VectorXd y(n);
        for (Index t = 0; t < n; ++t) {
            const SieveMeans m = sieve_means(z(t, 0), z(t, 1));
            const bool first_half = t < half;
            const int regime3 = t < third ? 0 : (t < two_third ? 1 : 2);
            double mu = 0.0;
            switch (d) {
                case 1: mu = m.a; break;
                case 2: mu = first_half ? 1.8 * m.l : 0.2 * m.l; break;
                case 3: mu = (regime3 == 0 ? 1.8 : regime3 == 1 ? 0.2 : 5.2) * m.l; break;
                case 4: mu = first_half ? m.b : 1.8 * m.l; break;
                case 5: mu = first_half ? m.c : m.a; break;
                case 6: mu = regime3 == 0 ? m.b : regime3 == 1 ? 1.8 * m.l : m.a; break;
                case 7: mu = regime3 == 0 ? m.c : regime3 == 1 ? m.a : 1.8 * m.l; break;
                default: break;
            }
            y(t) = mu + v(t);
        }
        out.sample = {y, z};
        if (d == 2 || d == 4 || d == 5) out.break_fractions = {static_cast<double>(half) / dn};
        if (d == 3 || d == 6 || d == 7) {
            out.break_fractions = {static_cast<double>(third) / dn, static_cast<double>(two_third) / dn};
        }
        return out;
    }

    if (const int h = catalog_index(spec.name, "H", 0, 6); h >= 0) {
        const MatrixXd z = gen_covariates(n, rng);
        const VectorXd v = gen_innovations(spec.innovation, n, rng);
        const double intercept2 = h == 0 ? 1.0 : 1.0 + 0.2 * h;
        VectorXd y(n);
        for (Index t = 0; t < n; ++t) {
            const double a0 = t < half ? 1.0 : intercept2;
            y(t) = 1.8 * loglog(a0 + z(t, 0) + z(t, 1)) + v(t);
        }
        out.sample = {y, z};
        if (h > 0) out.break_fractions = {static_cast<double>(half) / dn};
        return out;
    }

    if (starts_with(spec.name, "RHO:")) {
        const RhoParams rp = parse_rho(spec.name);
        MatrixXd z(n, rp.p - 1);
        for (Index t = 0; t < n; ++t) {
            for (Index j = 0; j < rp.p - 1; ++j) z(t, j) = rng.uniform(0.0, 5.0);
        }
        const VectorXd v = gen_innovations(spec.innovation, n, rng);
        VectorXd y(n);
        for (Index t = 0; t < n; ++t) {
            const double index = 1.0 + z.row(t).sum();
            y(t) = index * (t < half ? 1.0 : 1.0 + rp.rho) + v(t);
        }
        out.sample = {y, z};
        if (rp.rho != 0.0) out.break_fractions = {static_cast<double>(half) / dn};
        return out;
    }

    if (const int a = catalog_index(spec.name, "ARDGP", 1, 3); a > 0) {
        const VectorXd v = gen_innovations(spec.innovation, n + 24, rng);
        VectorXd y(n);
        for (Index t = 0; t < n; ++t) {
            const double vt = v(t + 24);
            if (a == 1) {
                y(t) = ma24(v, t);
            } else if (a == 2) {
                y(t) = t < half ? ma24(v, t) : vt;
            } else {
                if (t < third) {
                    y(t) = ma24(v, t);
                } else if (t < two_third) {
                    y(t) = vt;
                } else {
                    y(t) = 1.0 + 0.4 * y(t - 1) + vt;
                }
            }
        }
        out.sample = {y, MatrixXd(n, 0)};
        out.autoregressive = true;
        if (a == 2) out.break_fractions = {static_cast<double>(half) / dn};
        if (a == 3) out.break_fractions = {static_cast<double>(third) / dn, static_cast<double>(two_third) / dn};
        return out;
    }

    throw Error(ErrorCode::CatalogUnknown, kModule, "unknown design '" + spec.name + "'");
}

DesignSpec default_design_for(const std::string& dgp_name) {
    if (starts_with(dgp_name, "ARDGP")) return DesignSpec::ar(8);
    if (starts_with(dgp_name, "RHO:")) return DesignSpec::raw(true);
    return DesignSpec::polynomial(2);
}

VectorXd local_power_break(const VectorXd& tau, Index p, Index n) {
    const double norm = tau.norm();
    if (!(norm > 0.0) || p < 1 || n < 1) {
        throw Error(ErrorCode::InvalidConfig, kModule, "need a nonzero direction, p >= 1 and n >= 1");
    }
    const double scale = std::pow(2.0, 0.25) * std::pow(static_cast<double>(p), 0.25) / std::sqrt(static_cast<double>(n));
    return scale * tau / norm;
}

void ExperimentConfig::validate() const {
    dgp.validate();
    if (reps < 1) throw Error(ErrorCode::InvalidConfig, kModule, "reps must be positive");
    if (kernels.empty() || tests.empty() || levels.empty()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "kernels, tests and levels must be nonempty");
    }
    for (const auto& t : tests) t.validate();
    for (double a : levels) {
        if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidConfig, kModule, "levels must lie in (0,1)");
    }
    (void)make_grid(gamma_star, step);
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream s;
    s << "dgp=" << dgp.name << ";n=" << dgp.n << ";innovation=" << dgp.innovation.describe()
      << ";burn_in=" << dgp.innovation.burn_in << ";design=" << design.describe() << ";gamma_star=" << fmt(gamma_star)
      << ";step=" << fmt(step) << ";variance=" << (variance == VarianceMode::EickerWhite ? "ew" : "homo")
      << ";zeta=" << to_string(zeta) << ";kernels=";
    for (std::size_t i = 0; i < kernels.size(); ++i) s << (i ? "," : "") << kernel_label(kernels[i]);
    s << ";tests=";
    for (std::size_t i = 0; i < tests.size(); ++i) s << (i ? "," : "") << tests[i].describe();
    s << ";levels=";
    for (std::size_t i = 0; i < levels.size(); ++i) s << (i ? "," : "") << fmt(levels[i]);
    s << ";reps=" << reps << ";seed=" << seed << ";cv=" << (cv_source == CvSource::Table ? "table" : "simulate");
    if (cv_source == CvSource::Simulate) {
        s << ";null_reps=" << null_reps << ";null_resolution=" << null_resolution
          << ";construction=" << to_string(construction);
    }
    return s.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

bool CellKey::operator<(const CellKey& o) const noexcept {
    if (test != o.test) return test < o.test;
    if (kernel != o.kernel) return kernel < o.kernel;
    if (a0 != o.a0) return a0 < o.a0;
    return level < o.level;
}

std::string kernel_label(const KernelSpec& k) {
    if (k.kind == KernelKind::None) return "none";
    return to_string(k.kind) + ":" + fmt_short(k.a0);
}

const ExperimentCell& ExperimentResult::cell(const std::string& test, KernelKind kind, double a0, double level) const {
    const std::string kname = to_string(kind);
    for (const auto& c : cells) {
        if (c.key.test == test && c.key.kernel == kname && std::abs(c.key.level - level) < 1e-12 &&
            (kind == KernelKind::None || std::abs(c.key.a0 - a0) < 1e-12)) {
            return c;
        }
    }
    throw Error(ErrorCode::InvalidConfig, kModule, "no such cell: " + test + " " + kname);
}

namespace {

// Critical values per (test, level); kernel-independent.
struct CriticalValues {
    std::vector<std::vector<double>> cv;  // [test][level]
};

CriticalValues resolve_critical_values(const ExperimentConfig& config, Index p) {
    CriticalValues out;
    const CriticalValueTable table = CriticalValueTable::from_environment();
    std::vector<TestSpec> to_simulate;
    std::vector<std::size_t> sim_index;
    out.cv.assign(config.tests.size(), std::vector<double>(config.levels.size(), 0.0));
    for (std::size_t i = 0; i < config.tests.size(); ++i) {
        const TestSpec& t = config.tests[i];
        const bool tabulated = t.functional == Functional::Sup || t.functional == Functional::Avg;
        if (config.cv_source == CvSource::Table && tabulated) {
            for (std::size_t l = 0; l < config.levels.size(); ++l) {
                const CvRow& row = table.lookup(config.gamma_star, config.levels[l]);
                out.cv[i][l] = t.functional == Functional::Sup ? row.sup_cv : row.avg_cv;
            }
        } else if (t.functional == Functional::ExpW) {
            BesselConfig bc;
            bc.p = static_cast<long>(p);
            bc.resolution = config.null_resolution;
            bc.reps = config.null_reps;
            bc.seed = config.seed ^ 0xB355E1ULL;
            bc.threads = config.threads;
            const NullDistribution null = simulate_expw_null(bc, config.gamma_star, t.c);
            for (std::size_t l = 0; l < config.levels.size(); ++l) out.cv[i][l] = null.critical_value(config.levels[l]);
        } else {
            to_simulate.push_back(t);
            sim_index.push_back(i);
        }
    }
    if (!to_simulate.empty()) {
        LimitPathConfig lc;
        lc.resolution = config.null_resolution;
        lc.gamma_star = config.gamma_star;
        lc.reps = config.null_reps;
        lc.seed = config.seed ^ 0x5EEDULL;
        lc.construction = config.construction;
        lc.threads = config.threads;
        const auto nulls = simulate_null(lc, to_simulate);
        for (std::size_t j = 0; j < nulls.size(); ++j) {
            for (std::size_t l = 0; l < config.levels.size(); ++l) {
                out.cv[sim_index[j]][l] = nulls[j].critical_value(config.levels[l]);
            }
        }
    }
    return out;
}

struct RepOutcome {
    bool ok = false;
    std::string failure;
    std::vector<double> stats;   // [test * kernels + kernel]
    std::vector<double> v_hats;  // [kernel]
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const BreakGrid grid = make_grid(config.gamma_star, config.step);
    const std::size_t nk = config.kernels.size();
    const std::size_t nt = config.tests.size();

    // Column count from the first replication's design.
    Index p = 0;
    {
        RandomStream rng(config.seed, 0);
        const SimulatedSample s = gen_dgp(config.dgp, rng);
        p = config.design.kind == DesignKind::ArLags ? config.design.ar_order + 1
                                                     : config.design.column_count(s.sample.k());
    }
    const CriticalValues cvs = resolve_critical_values(config, p);

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.reps));
    parallel_for(outcomes.size(), config.threads, [&](std::size_t r) {
        RepOutcome& o = outcomes[r];
        try {
            RandomStream rng(config.seed, r);
            const SimulatedSample s = gen_dgp(config.dgp, rng);
            const RegressionData data = build_design(s.sample, config.design);
            const BreakProcess bp = compute_break_process(data.design, data.y, grid, config.variance, 1);
            o.stats.assign(nt * nk, 0.0);
            o.v_hats.assign(nk, 1.0);
            for (std::size_t k = 0; k < nk; ++k) {
                const HarEstimate har = estimate_har(data.design, data.y, config.variance, config.kernels[k], config.zeta);
                o.v_hats[k] = har.v_hat;
                for (std::size_t t = 0; t < nt; ++t) o.stats[t * nk + k] = compute_stat(config.tests[t], bp, har).stat;
            }
            o.ok = true;
        } catch (const std::exception& e) {
            o.ok = false;
            o.failure = failure_name(e);
        }
    });

    ExperimentResult res;
    res.config = config;
    res.p = p;
    res.v_hats.assign(nk, {});
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t k = 0; k < nk; ++k) {
            for (std::size_t l = 0; l < config.levels.size(); ++l) {
                ExperimentCell c;
                c.key = {to_string(config.tests[t].functional), to_string(config.kernels[k].kind),
                         config.kernels[k].kind == KernelKind::None ? 0.0 : config.kernels[k].a0, config.levels[l]};
                c.critical_value = cvs.cv[t][l];
                res.cells.push_back(c);
            }
        }
    }
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++res.failures;
            ++res.failure_codes[o.failure];
            continue;
        }
        std::size_t idx = 0;
        for (std::size_t t = 0; t < nt; ++t) {
            for (std::size_t k = 0; k < nk; ++k) {
                const double stat = o.stats[t * nk + k];
                for (std::size_t l = 0; l < config.levels.size(); ++l, ++idx) {
                    ExperimentCell& c = res.cells[idx];
                    ++c.valid;
                    if (stat > c.critical_value) ++c.rejections;
                }
                if (config.keep_draws) {
                    res.draws[config.tests[t].describe() + "/" + kernel_label(config.kernels[k])].push_back(stat);
                }
            }
        }
        for (std::size_t k = 0; k < nk; ++k) res.v_hats[k].push_back(o.v_hats[k]);
    }
    return res;
}

std::string ExperimentResult::to_csv() const {
    std::ostringstream s;
    s << "dgp,n,p,innovation,gamma_star,test,kernel,a0,level,critical_value,rejection_rate,rejections,valid,reps,"
         "failures,seed,config_hash\n";
    const std::string hash = hex64(config.hash());
    for (const auto& c : cells) {
        char line[512];
        std::snprintf(line, sizeof line, "%s,%ld,%ld,%s,%.4f,%s,%s,%g,%.4f,%.6f,%.4f,%ld,%ld,%ld,%ld,%llu,%s\n",
                      config.dgp.name.c_str(), static_cast<long>(config.dgp.n), static_cast<long>(p),
                      config.dgp.innovation.describe().c_str(), config.gamma_star, c.key.test.c_str(),
                      c.key.kernel.c_str(), c.key.a0, c.key.level, c.critical_value, c.rate(), c.rejections, c.valid,
                      config.reps, failures, static_cast<unsigned long long>(config.seed), hash.c_str());
        s << line;
    }
    return s.str();
}

std::string ExperimentResult::to_text() const {
    std::ostringstream s;
    s << config.dgp.name << "  n=" << config.dgp.n << "  p=" << p << "  innovation=" << config.dgp.innovation.describe()
      << "  gamma*=" << fmt_short(config.gamma_star) << "  reps=" << config.reps << "  failures=" << failures
      << "  seed=" << config.seed << "  hash=" << hex64(config.hash()) << "\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-14s %7s %10s %10s\n", "test", "kernel", "level", "cv", "rate");
    s << line;
    for (const auto& c : cells) {
        const std::string kname =
            c.key.kernel == "none" ? std::string("none") : c.key.kernel + ":" + fmt_short(c.key.a0);
        std::snprintf(line, sizeof line, "%-8s %-14s %7.2f %10.4f %10.4f\n", c.key.test.c_str(), kname.c_str(),
                      c.key.level, c.critical_value, c.rate());
        s << line;
    }
    for (const auto& [code, count] : failure_codes) s << "failed replications (" << code << "): " << count << "\n";
    return s.str();
}

void EnvelopeConfig::validate() const {
    (void)make_grid(gamma_star, step);
    if (reps < 1 || null_reps < 10) throw Error(ErrorCode::InvalidConfig, kModule, "too few replications");
    if (!(c_min > 0.0) || !(c_step > 0.0) || !(c_max >= c_min)) {
        throw Error(ErrorCode::InvalidConfig, kModule, "invalid c grid");
    }
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidConfig, kModule, "level must lie in (0,1)");
    if (degree < 0) throw Error(ErrorCode::InvalidConfig, kModule, "degree must be >= 0");
}

std::string EnvelopeConfig::canonical() const {
    std::ostringstream s;
    s << "envelope;n=" << n << ";degree=" << degree << ";gamma_star=" << fmt(gamma_star) << ";step=" << fmt(step)
      << ";reps=" << reps << ";null_reps=" << null_reps << ";level=" << fmt(level) << ";c=" << fmt(c_min) << ":"
      << fmt(c_step) << ":" << fmt(c_max) << ";seed=" << seed;
    return s.str();
}

namespace {

// Per grid point, the pieces of a homoskedastic Wald statistic for
// y = e + s g, which is a ratio of quadratics in s:
// W(s) = n^2 (a + 2 s b + s^2 d) / (A + 2 s B + s^2 C).
struct WaldPieces {
    std::vector<double> a, b, d, rss_a, rss_b, rss_c;

    [[nodiscard]] double wald(std::size_t i, double s, double n) const {
        const double num = a[i] + 2.0 * s * b[i] + s * s * d[i];
        const double den = rss_a[i] + 2.0 * s * rss_b[i] + s * s * rss_c[i];
        return std::max(0.0, n * n * num / den);
    }
};

WaldPieces wald_pieces(const DesignMatrix& x, const BreakGrid& grid, const VectorXd& e, const VectorXd* g) {
    const std::size_t m = grid.size();
    const double n = static_cast<double>(x.n_eff());
    WaldPieces out;
    for (auto* v : {&out.a, &out.b, &out.d, &out.rss_a, &out.rss_b, &out.rss_c}) v->assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const SplitDesign split = split_design(x, grid.points[i]);
        const Index p = split.p();
        const OlsFit fe = ols(split.x_gamma, e);
        const MatrixXd mhat = split.x_gamma.transpose() * split.x_gamma / n;
        Eigen::LLT<MatrixXd> llt(mhat);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::SingularVariance, kModule, "M(gamma) not positive definite");
        }
        MatrixXd rt = MatrixXd::Zero(2 * p, p);
        rt.bottomRows(p).setIdentity();
        const MatrixXd block = rt.transpose() * llt.solve(rt);
        Eigen::LDLT<MatrixXd> h(block);
        const VectorXd de = fe.coef.tail(p);
        const VectorXd hde = h.solve(de);
        out.a[i] = de.dot(hde);
        out.rss_a[i] = fe.rss;
        if (g != nullptr) {
            const OlsFit fg = ols(split.x_gamma, *g);
            const VectorXd dg = fg.coef.tail(p);
            out.b[i] = dg.dot(hde);
            out.d[i] = dg.dot(h.solve(dg));
            out.rss_b[i] = fe.residuals.dot(fg.residuals);
            out.rss_c[i] = fg.rss;
        }
    }
    return out;
}

}  // namespace

EnvelopeResult power_curve(const EnvelopeConfig& config) {
    config.validate();
    const BreakGrid grid = make_grid(config.gamma_star, config.step);
    const std::size_t m = grid.size();
    const double dn = static_cast<double>(config.n);

    EnvelopeResult res;
    res.config = config;
    const auto nc = static_cast<std::size_t>(std::floor((config.c_max - config.c_min) / config.c_step + 1e-9)) + 1;
    for (std::size_t j = 0; j < nc; ++j) res.c.push_back(config.c_min + static_cast<double>(j) * config.c_step);
    res.p = static_cast<Index>(DesignSpec::polynomial(config.degree).column_count(2));
    const double p = static_cast<double>(res.p);

    // Null: ExpW(c) for every c from one Wald path per replication.
    std::vector<std::vector<double>> null_draws(nc, std::vector<double>(static_cast<std::size_t>(config.null_reps)));
    const std::uint64_t null_seed = splitmix64(config.seed ^ 0x6E756C6CULL);
    parallel_for(static_cast<std::size_t>(config.null_reps), config.threads, [&](std::size_t r) {
        RandomStream rng(null_seed, r);
        const DesignMatrix x = build_polynomial_basis(gen_covariates(config.n, rng), config.degree);
        VectorXd e(config.n);
        for (Index t = 0; t < config.n; ++t) e(t) = rng.normal();
        const WaldPieces w = wald_pieces(x, grid, e, nullptr);
        std::vector<double> path(m);
        for (std::size_t i = 0; i < m; ++i) path[i] = w.wald(i, 0.0, dn);
        for (std::size_t j = 0; j < nc; ++j) null_draws[j][r] = path_log_expw(path.data(), m, p, res.c[j]);
    });
    res.critical_value.resize(nc);
    for (std::size_t j = 0; j < nc; ++j) {
        std::sort(null_draws[j].begin(), null_draws[j].end());
        res.critical_value[j] = quantile_type7(null_draws[j], 1.0 - config.level);
    }

    // Alternative: y = e + sqrt(c) g with g = (n sqrt p)^{-1/2} gamma_t x_t' b1,
    // b1 ~ N(0, (g0(1-g0) M)^{-1}), so b = sqrt(c) b1 has covariance c (g0(1-g0) M)^{-1}.
    std::vector<std::vector<char>> reject(nc, std::vector<char>(static_cast<std::size_t>(config.reps), 0));
    parallel_for(static_cast<std::size_t>(config.reps), config.threads, [&](std::size_t r) {
        RandomStream rng(config.seed, r);
        const DesignMatrix x = build_polynomial_basis(gen_covariates(config.n, rng), config.degree);
        VectorXd e(config.n);
        for (Index t = 0; t < config.n; ++t) e(t) = rng.normal();
        const auto pick = std::min<std::size_t>(m - 1, static_cast<std::size_t>(rng.uniform(0.0, 1.0) * static_cast<double>(m)));
        const double g0 = grid.points[pick];
        VectorXd u(res.p);
        for (Index i = 0; i < res.p; ++i) u(i) = rng.normal();
        const MatrixXd mhat = x.x.transpose() * x.x / dn;
        Eigen::LLT<MatrixXd> llt(mhat);
        const VectorXd b1 = llt.matrixU().solve(u) / std::sqrt(g0 * (1.0 - g0));
        const Index k = split_index_for(config.n, g0);
        VectorXd g = x.x * b1 / std::sqrt(dn * std::sqrt(p));
        g.head(k) *= g0 - 1.0;
        g.tail(config.n - k) *= g0;
        const WaldPieces w = wald_pieces(x, grid, e, &g);
        std::vector<double> path(m);
        for (std::size_t j = 0; j < nc; ++j) {
            const double s = std::sqrt(res.c[j]);
            for (std::size_t i = 0; i < m; ++i) path[i] = w.wald(i, s, dn);
            reject[j][r] = path_log_expw(path.data(), m, p, res.c[j]) > res.critical_value[j] ? 1 : 0;
        }
    });
    res.power.resize(nc);
    for (std::size_t j = 0; j < nc; ++j) {
        long hits = 0;
        for (char v : reject[j]) hits += v;
        res.power[j] = static_cast<double>(hits) / static_cast<double>(config.reps);
    }
    for (std::size_t j = 0; j < nc; ++j) {
        if (res.power[j] >= 0.5) {
            if (j == 0) {
                res.solution = res.c[0];
            } else {
                const double f = (0.5 - res.power[j - 1]) / (res.power[j] - res.power[j - 1]);
                res.solution = res.c[j - 1] + f * (res.c[j] - res.c[j - 1]);
            }
            break;
        }
    }
    return res;
}

EnvelopeResult power_envelope(const EnvelopeConfig& config) {
    EnvelopeResult res = power_curve(config);
    if (!res.solution) {
        throw Error(ErrorCode::NoCrossing, kModule, "power stays below 1/2 on the c grid");
    }
    return res;
}

std::string EnvelopeResult::to_csv() const {
    std::ostringstream s;
    s << "c,power,critical_value,n,p,gamma_star,reps,null_reps,seed,config_hash\n";
    const std::string hash = hex64(fnv1a(config.canonical()));
    char line[256];
    for (std::size_t j = 0; j < c.size(); ++j) {
        std::snprintf(line, sizeof line, "%.2f,%.4f,%.6f,%ld,%ld,%.4f,%ld,%ld,%llu,%s\n", c[j], power[j],
                      critical_value[j], static_cast<long>(config.n), static_cast<long>(p), config.gamma_star,
                      config.reps, config.null_reps, static_cast<unsigned long long>(config.seed), hash.c_str());
        s << line;
    }
    return s.str();
}

}  // namespace sbreak
