// sbreak: structural break tests for growing-dimension regressions.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numerical failure, 1 anything else.

#include "sbreak/csv_io.hpp"
#include "sbreak/cv_table.hpp"
#include "sbreak/error.hpp"
#include "sbreak/experiment_config.hpp"
#include "sbreak/montecarlo.hpp"
#include "sbreak/null_sim.hpp"
#include "sbreak/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sbreak;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::FileNotFound, "cli", "cannot write " + path);
    f << text;
}

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::Data: return 3;
        case ErrorCategory::Numerical: return 4;
    }
    return 1;
}

struct TestArgs {
    std::string input;
    std::string response = "y";
    std::string covariates;
    int ar_order = 0;
    int degree = 2;
    bool raw = false;
    double gamma_star = 0.35;
    double step = 0.005;
    std::string variance = "homo";
    std::string kernel = "parzen:14";
    std::string zeta = "ones-vector";
    std::string test = "sup";
    std::string levels = "0.01,0.05,0.10";
    std::string cv = "bundled";
    long null_reps = 10000;
    long resolution = 3600;
    std::uint64_t seed = 20240501;
    std::string construction = "ou";
    std::string format = "text";
    std::string output;
    std::string plot_output;
    unsigned threads = 0;
};

int run_test_command(const TestArgs& a) {
    RunConfig c;
    c.input = a.input;
    c.response = a.response;
    c.covariates = split_list(a.covariates);
    if (a.ar_order > 0) {
        c.design = DesignSpec::ar(a.ar_order);
    } else if (a.raw) {
        c.design = DesignSpec::raw(true);
    } else {
        c.design = DesignSpec::polynomial(a.degree);
    }
    c.gamma_star = a.gamma_star;
    c.step = a.step;
    c.variance = parse_variance(a.variance);
    c.kernel = parse_kernel(a.kernel);
    c.zeta = parse_zeta(a.zeta);
    c.test = parse_test(a.test);
    c.levels = parse_levels(a.levels);
    if (a.cv == "bundled") {
        c.cv_mode = CriticalValueMode::Bundled;
    } else if (a.cv == "simulate") {
        c.cv_mode = CriticalValueMode::Simulate;
    } else {
        throw Error(ErrorCode::InvalidConfig, "cli", "--cv must be bundled or simulate");
    }
    c.null_reps = a.null_reps;
    c.null_resolution = a.resolution;
    c.null_seed = a.seed;
    c.construction = parse_construction(a.construction);
    c.threads = a.threads;

    const PipelineResult r = run_test(c);
    if (a.format == "json") {
        emit(report_json(r), a.output);
    } else if (a.format == "csv-plotdata") {
        emit(plot_csv(r), a.output);
    } else if (a.format == "text") {
        emit(report_text(r), a.output);
    } else {
        throw Error(ErrorCode::InvalidConfig, "cli", "--format must be text, json or csv-plotdata");
    }
    if (!a.plot_output.empty()) emit(plot_csv(r), a.plot_output);
    return 0;
}

struct CritArgs {
    std::string gamma_stars;
    std::string levels = "0.01,0.05,0.10";
    long reps = 10000;
    long resolution = 3600;
    std::uint64_t seed = 20240501;
    std::string construction = "ou";
    unsigned threads = 0;
    std::string output;
    bool bundled = false;
};

int run_critvals_command(const CritArgs& a) {
    if (a.bundled) {
        emit(CriticalValueTable::bundled().to_csv(), a.output);
        return 0;
    }
    std::vector<double> gammas;
    if (a.gamma_stars.empty()) {
        for (const auto& row : CriticalValueTable::bundled().rows()) {
            if (gammas.empty() || gammas.back() != row.gamma_star) gammas.push_back(row.gamma_star);
        }
    } else {
        gammas = parse_levels(a.gamma_stars);
    }
    LimitPathConfig lc;
    lc.reps = a.reps;
    lc.resolution = a.resolution;
    lc.seed = a.seed;
    lc.construction = parse_construction(a.construction);
    lc.threads = a.threads;
    const CriticalValueTable t = critical_value_table(gammas, parse_levels(a.levels), lc);
    emit(t.to_csv(), a.output);
    return 0;
}

struct McArgs {
    std::string config;
    std::string dgp = "DGP1";
    long n = 300;
    long reps = 500;
    std::uint64_t seed = 1;
    std::string innovation = "iid";
    std::string design;
    double gamma_star = 0.35;
    std::string variance = "homo";
    std::string zeta = "ones-vector";
    std::string kernels = "parzen:14";
    std::string tests = "sup";
    std::string levels = "0.01,0.05,0.10";
    std::string cv = "table";
    unsigned threads = 0;
    std::string format = "text";
    std::string output;
};

int run_mc_command(const McArgs& a, const CLI::App& sub) {
    ExperimentConfig c;
    if (!a.config.empty()) {
        c = load_experiment_config(a.config);
        if (sub.count("--threads") > 0) c.threads = a.threads;
        if (sub.count("--reps") > 0) c.reps = a.reps;
        if (sub.count("--seed") > 0) c.seed = a.seed;
    } else {
        c.dgp.name = a.dgp;
        c.dgp.n = a.n;
        c.dgp.innovation = parse_innovation(a.innovation);
        c.reps = a.reps;
        c.seed = a.seed;
        c.design = a.design.empty() ? default_design_for(a.dgp) : parse_design(a.design);
        c.gamma_star = a.gamma_star;
        c.variance = parse_variance(a.variance);
        c.zeta = parse_zeta(a.zeta);
        c.kernels = parse_kernels(a.kernels);
        c.tests = parse_tests(a.tests);
        c.levels = parse_levels(a.levels);
        if (a.cv != "table" && a.cv != "simulate") {
            throw Error(ErrorCode::InvalidConfig, "cli", "--cv must be table or simulate");
        }
        c.cv_source = a.cv == "simulate" ? CvSource::Simulate : CvSource::Table;
        c.threads = a.threads;
    }
    const ExperimentResult r = run_experiment(c);
    if (a.format == "csv") {
        emit(r.to_csv(), a.output);
    } else if (a.format == "text") {
        emit(r.to_text(), a.output);
    } else {
        throw Error(ErrorCode::InvalidConfig, "cli", "--format must be text or csv");
    }
    return 0;
}

struct EnvArgs {
    EnvelopeConfig config;
    std::string output;
};

int run_envelope_command(const EnvArgs& a) {
    const EnvelopeResult r = power_curve(a.config);
    if (!a.output.empty()) emit(r.to_csv(), a.output);
    char line[128];
    if (r.solution) {
        std::snprintf(line, sizeof line, "n=%ld p=%ld gamma*=%.2f reps=%ld: P(c)=1/2 at c = %.3f\n",
                      static_cast<long>(a.config.n), static_cast<long>(r.p), a.config.gamma_star, a.config.reps,
                      *r.solution);
        std::cout << line;
        return 0;
    }
    throw Error(ErrorCode::NoCrossing, "montecarlo", "power stays below 1/2 on the c grid");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural break tests for regressions with a growing number of regressors"};
    app.require_subcommand(1);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Run a break test on a CSV file");
    test->add_option("-i,--input", ta.input, "CSV file with a header row")->required();
    test->add_option("--response", ta.response, "Response column")->capture_default_str();
    test->add_option("--covariates", ta.covariates, "Comma-separated covariate columns");
    test->add_option("--ar-order", ta.ar_order, "Fit an AR(q) in the response instead of a sieve");
    test->add_option("--degree", ta.degree, "Polynomial sieve degree")->capture_default_str();
    test->add_flag("--raw", ta.raw, "Use covariates as given (plus intercept)");
    test->add_option("--gamma-star", ta.gamma_star, "Trimming")->capture_default_str();
    test->add_option("--step", ta.step, "Grid spacing")->capture_default_str();
    test->add_option("--variance", ta.variance, "ew or homo")->capture_default_str();
    test->add_option("--kernel", ta.kernel, "parzen:a0, bartlett:a0 or none")->capture_default_str();
    test->add_option("--zeta", ta.zeta, "last-obs or ones-vector")->capture_default_str();
    test->add_option("--test", ta.test, "sup, avg, expq:c or expw:c")->capture_default_str();
    test->add_option("--levels", ta.levels, "Comma-separated levels")->capture_default_str();
    test->add_option("--cv", ta.cv, "bundled or simulate")->capture_default_str();
    test->add_option("--null-reps", ta.null_reps, "Null replications when simulating")->capture_default_str();
    test->add_option("--resolution", ta.resolution, "Limit grid resolution N")->capture_default_str();
    test->add_option("--seed", ta.seed, "Null simulation seed")->capture_default_str();
    test->add_option("--construction", ta.construction, "ou, white-noise, ito or pointwise")->capture_default_str();
    test->add_option("--format", ta.format, "text, json or csv-plotdata")->capture_default_str();
    test->add_option("-o,--output", ta.output, "Output file (default stdout)");
    test->add_option("--plot-output", ta.plot_output, "Also write (gamma, W, Q) rows here");
    test->add_option("--threads", ta.threads, "Worker threads (0 = all cores)");

    CritArgs ca;
    auto* crit = app.add_subcommand("critvals", "Simulate sup/avg critical values");
    crit->add_option("--gamma-star", ca.gamma_stars, "Comma-separated trimming values (default: table grid)");
    crit->add_option("--levels", ca.levels, "Comma-separated levels")->capture_default_str();
    crit->add_option("--reps", ca.reps, "Replications")->capture_default_str();
    crit->add_option("--resolution", ca.resolution, "Grid resolution N")->capture_default_str();
    crit->add_option("--seed", ca.seed, "Seed")->capture_default_str();
    crit->add_option("--construction", ca.construction, "ou, white-noise, ito or pointwise")->capture_default_str();
    crit->add_option("--threads", ca.threads, "Worker threads (0 = all cores)");
    crit->add_option("-o,--output", ca.output, "Output CSV (default stdout)");
    crit->add_flag("--bundled", ca.bundled, "Write the bundled table instead of simulating");

    McArgs ma;
    auto* mc = app.add_subcommand("mc", "Monte Carlo rejection rates");
    mc->add_option("--config", ma.config, "Experiment file (key = value lines); --reps, --seed and --threads override it");
    mc->add_option("--dgp", ma.dgp, "DGP1..DGP7, ARDGP1..3, H0..H6, RHO:<rho>:<p>")->capture_default_str();
    mc->add_option("--n", ma.n, "Sample size")->capture_default_str();
    mc->add_option("--reps", ma.reps, "Replications")->capture_default_str();
    mc->add_option("--seed", ma.seed, "Master seed")->capture_default_str();
    mc->add_option("--innovation", ma.innovation, "iid, arch or garch")->capture_default_str();
    mc->add_option("--design", ma.design, "poly:d, ar:q or raw (default per DGP)");
    mc->add_option("--gamma-star", ma.gamma_star, "Trimming")->capture_default_str();
    mc->add_option("--variance", ma.variance, "ew or homo")->capture_default_str();
    mc->add_option("--zeta", ma.zeta, "last-obs or ones-vector")->capture_default_str();
    mc->add_option("--kernels", ma.kernels, "Comma-separated kernels")->capture_default_str();
    mc->add_option("--tests", ma.tests, "Comma-separated tests")->capture_default_str();
    mc->add_option("--levels", ma.levels, "Comma-separated levels")->capture_default_str();
    mc->add_option("--cv", ma.cv, "table or simulate")->capture_default_str();
    mc->add_option("--threads", ma.threads, "Worker threads (0 = all cores)");
    mc->add_option("--format", ma.format, "text or csv")->capture_default_str();
    mc->add_option("-o,--output", ma.output, "Output file (default stdout)");

    EnvArgs ea;
    auto* env = app.add_subcommand("envelope", "Power curve of ExpW(c) and the solution of P(c) = 1/2");
    env->add_option("--n", ea.config.n, "Sample size")->capture_default_str();
    env->add_option("--degree", ea.config.degree, "Polynomial degree")->capture_default_str();
    env->add_option("--gamma-star", ea.config.gamma_star, "Trimming")->capture_default_str();
    env->add_option("--reps", ea.config.reps, "Replications under the alternative")->capture_default_str();
    env->add_option("--null-reps", ea.config.null_reps, "Null replications")->capture_default_str();
    env->add_option("--level", ea.config.level, "Test level")->capture_default_str();
    env->add_option("--c-min", ea.config.c_min, "Smallest c")->capture_default_str();
    env->add_option("--c-max", ea.config.c_max, "Largest c")->capture_default_str();
    env->add_option("--c-step", ea.config.c_step, "c spacing")->capture_default_str();
    env->add_option("--seed", ea.config.seed, "Seed")->capture_default_str();
    env->add_option("--threads", ea.config.threads, "Worker threads (0 = all cores)");
    env->add_option("-o,--output", ea.output, "Power curve CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*test) return run_test_command(ta);
        if (*crit) return run_critvals_command(ca);
        if (*mc) return run_mc_command(ma, *mc);
        if (*env) return run_envelope_command(ea);
    } catch (const sbreak::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
