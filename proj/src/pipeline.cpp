#include "sbreak/pipeline.hpp"

#include "sbreak/csv_io.hpp"
#include "sbreak/error.hpp"
#include "sbreak/experiment_config.hpp"
#include "sbreak/montecarlo.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "cli";

std::string level_key(double level) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", level);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    if (design.kind == DesignKind::ArLags && !covariates.empty()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "an AR design takes no covariate columns");
    }
    if (design.kind != DesignKind::ArLags && covariates.empty() && design.kind != DesignKind::RawColumns) {
        throw Error(ErrorCode::InvalidConfig, kModule, "a sieve design needs at least one covariate column");
    }
    test.validate();
    (void)make_grid(gamma_star, step);
    if (levels.empty()) throw Error(ErrorCode::InvalidConfig, kModule, "at least one level is required");
    for (double a : levels) {
        if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidConfig, kModule, "levels must lie in (0,1)");
    }
    if (kernel.kind != KernelKind::None && !(kernel.a0 > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, kModule, "a0 must be positive");
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream s;
    s.precision(17);
    s << "input=" << input << ";response=" << response << ";covariates=";
    for (std::size_t i = 0; i < covariates.size(); ++i) s << (i ? "," : "") << covariates[i];
    s << ";design=" << design.describe() << ";gamma_star=" << gamma_star << ";step=" << step
      << ";variance=" << to_string(variance) << ";kernel=" << kernel_label(kernel) << ";zeta=" << to_string(zeta)
      << ";test=" << test.describe() << ";levels=";
    for (std::size_t i = 0; i < levels.size(); ++i) s << (i ? "," : "") << levels[i];
    s << ";cv=" << (cv_mode == CriticalValueMode::Bundled ? "bundled" : "simulate");
    if (cv_mode == CriticalValueMode::Simulate || test.functional == Functional::ExpQ ||
        test.functional == Functional::ExpW) {
        s << ";null_reps=" << null_reps << ";null_resolution=" << null_resolution << ";null_seed=" << null_seed
          << ";construction=" << to_string(construction);
    }
    return s.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

PipelineResult run_pipeline(const RawSample& sample, const RunConfig& config) {
    config.validate();
    PipelineResult out;
    out.config = config;
    out.n = sample.n();
    const RegressionData data = build_design(sample, config.design);
    out.labels = data.design.labels;
    const BreakGrid grid = make_grid(config.gamma_star, config.step);
    out.process = compute_break_process(data.design, data.y, grid, config.variance, config.threads);
    out.har = estimate_har(data.design, data.y, config.variance, config.kernel, config.zeta);
    const StatValue sv = compute_stat(config.test, out.process, out.har);

    const bool tabulated = config.test.functional == Functional::Sup || config.test.functional == Functional::Avg;
    if (config.cv_mode == CriticalValueMode::Bundled && tabulated) {
        out.report = decide_with_table(sv.stat, config.test, config.gamma_star, CriticalValueTable::from_environment(),
                                       config.levels);
    } else if (config.test.functional == Functional::ExpW) {
        BesselConfig bc;
        bc.p = static_cast<long>(data.design.p());
        bc.resolution = config.null_resolution;
        bc.reps = config.null_reps;
        bc.seed = config.null_seed;
        bc.threads = config.threads;
        out.report = decide(sv.stat, config.test, simulate_expw_null(bc, config.gamma_star, config.test.c), config.levels);
    } else {
        LimitPathConfig lc;
        lc.resolution = config.null_resolution;
        lc.gamma_star = config.gamma_star;
        lc.reps = config.null_reps;
        lc.seed = config.null_seed;
        lc.construction = config.construction;
        lc.threads = config.threads;
        out.report = decide(sv.stat, config.test, critical_values(lc, config.test), config.levels);
    }
    out.report.v_hat = out.har.v_hat;
    out.report.gamma_hat = sv.gamma_hat;
    if (config.kernel.kind == KernelKind::None) {
        out.report.warnings.push_back(
            "uncorrected: no HAR correction (V-hat = 1); sizes can be distorted under nonlinear serial dependence");
    }
    if (out.har.floored) out.report.warnings.push_back("V-hat floored at 1e-4");
    return out;
}

PipelineResult run_test(const RunConfig& config) {
    config.validate();
    const RawSample sample = ingest_csv(config.input, config.response, config.covariates);
    return run_pipeline(sample, config);
}

std::string report_json(const PipelineResult& r) {
    using nlohmann::json;
    const RunConfig& c = r.config;
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config_hash"] = hex64(c.hash());

    json cfg;
    cfg["input"] = c.input;
    cfg["response"] = c.response;
    cfg["covariates"] = c.covariates;
    cfg["design"] = c.design.describe();
    cfg["gamma_star"] = c.gamma_star;
    cfg["step"] = c.step;
    cfg["variance_mode"] = to_string(c.variance);
    cfg["kernel"] = to_string(c.kernel.kind);
    cfg["a0"] = c.kernel.kind == KernelKind::None ? json(nullptr) : json(c.kernel.a0);
    cfg["zeta_mode"] = to_string(c.zeta);
    cfg["test"] = to_string(c.test.functional);
    cfg["c"] = (c.test.functional == Functional::ExpQ || c.test.functional == Functional::ExpW) ? json(c.test.c)
                                                                                                : json(nullptr);
    cfg["levels"] = c.levels;
    cfg["critical_values"] = c.cv_mode == CriticalValueMode::Bundled ? "bundled" : "simulate";
    cfg["null_reps"] = c.null_reps;
    cfg["null_resolution"] = c.null_resolution;
    cfg["null_seed"] = c.null_seed;
    cfg["construction"] = to_string(c.construction);
    j["config"] = cfg;

    json data;
    data["n"] = r.n;
    data["n_eff"] = r.process.n_eff;
    data["p"] = r.process.p;
    data["labels"] = r.labels;
    j["data"] = data;

    const PathMax wmax = path_max(r.process.wald.data(), r.process.wald.size());
    const PathMax qmax = path_max(r.process.q.data(), r.process.q.size());
    json bp;
    bp["grid_size"] = r.process.grid.size();
    bp["gamma_first"] = r.process.grid.points.front();
    bp["gamma_last"] = r.process.grid.points.back();
    bp["max_wald"] = wmax.value;
    bp["max_q"] = qmax.value;
    bp["mean_q"] = path_mean(r.process.q.data(), r.process.q.size());
    bp["gamma_hat_ssr"] = r.process.gamma_ssr;
    j["break_process"] = bp;

    json har;
    har["kernel"] = to_string(r.har.kernel.kind);
    har["bandwidth"] = r.har.bandwidth;
    har["v_hat"] = r.har.v_hat;
    har["v_raw"] = r.har.v_raw;
    har["floored"] = r.har.floored;
    har["uncorrected"] = r.har.kernel.kind == KernelKind::None;
    j["har"] = har;

    json t;
    t["functional"] = to_string(r.report.spec.functional);
    t["statistic"] = r.report.statistic;
    t["v_hat"] = r.report.v_hat;
    t["gamma_hat"] = r.report.gamma_hat ? json(*r.report.gamma_hat) : json(nullptr);
    t["p_value"] = r.report.p_value ? json(*r.report.p_value) : json(nullptr);
    t["cv_source"] = r.report.cv_source;
    json cvs = json::object();
    json rej = json::object();
    for (const auto& [level, cv] : r.report.critical_values) cvs[level_key(level)] = cv;
    for (const auto& [level, d] : r.report.reject) rej[level_key(level)] = d;
    t["critical_values"] = cvs;
    t["reject"] = rej;
    j["test"] = t;
    j["warnings"] = r.report.warnings;
    return j.dump(2) + "\n";
}

std::string report_text(const PipelineResult& r) {
    std::ostringstream s;
    char line[256];
    s << "structural break test: " << r.report.spec.describe() << "\n";
    std::snprintf(line, sizeof line, "n = %ld, n_eff = %ld, p = %ld, design = %s\n", static_cast<long>(r.n),
                  static_cast<long>(r.process.n_eff), static_cast<long>(r.process.p),
                  r.config.design.describe().c_str());
    s << line;
    std::snprintf(line, sizeof line, "grid [%.4f, %.4f], %zu points, variance %s\n", r.process.grid.points.front(),
                  r.process.grid.points.back(), r.process.grid.size(), to_string(r.config.variance).c_str());
    s << line;
    std::snprintf(line, sizeof line, "kernel %s, bandwidth %ld, V-hat %.6f\n", kernel_label(r.har.kernel).c_str(),
                  static_cast<long>(r.har.bandwidth), r.har.v_hat);
    s << line;
    std::snprintf(line, sizeof line, "statistic %.6f", r.report.statistic);
    s << line;
    if (r.report.gamma_hat) {
        std::snprintf(line, sizeof line, "   gamma-hat %.4f", *r.report.gamma_hat);
        s << line;
    }
    if (r.report.p_value) {
        std::snprintf(line, sizeof line, "   p-value %.4f", *r.report.p_value);
        s << line;
    }
    s << "\n";
    for (const auto& [level, cv] : r.report.critical_values) {
        std::snprintf(line, sizeof line, "  %5.1f%%  cv %10.4f  %s\n", 100.0 * level, cv,
                      r.report.reject.at(level) ? "reject" : "do not reject");
        s << line;
    }
    for (const auto& w : r.report.warnings) s << "warning: " << w << "\n";
    return s.str();
}

std::string plot_csv(const PipelineResult& r) {
    std::string out = "gamma,wald,q\n";
    for (std::size_t i = 0; i < r.process.grid.size(); ++i) {
        out += format_double(r.process.grid.points[i]) + "," + format_double(r.process.wald[i]) + "," +
               format_double(r.process.q[i]) + "\n";
    }
    return out;
}

}  // namespace sbreak
