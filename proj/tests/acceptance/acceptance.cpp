// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: sbreak_acceptance [criterion ...]   (default: all)

#include "common/oracles.hpp"

#include "sbreak/break_process.hpp"
#include "sbreak/csv_io.hpp"
#include "sbreak/functional.hpp"
#include "sbreak/har.hpp"
#include "sbreak/montecarlo.hpp"
#include "sbreak/null_sim.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace sbreak;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and targets.
namespace tol {
constexpr double kSup5_35 = 3.9090, kSup5_35Tol = 0.10;
constexpr double kSup1_35 = 4.2737, kSup1_35Tol = 0.12;
constexpr double kAvg5_35 = 0.0493, kAvg5_35Tol = 0.006;
constexpr double kSup5_15 = 4.1123, kSup5_15Tol = 0.10;
constexpr double kCovSe = 3.0;
constexpr double kParzenSize = 0.080, kBartlettSize = 0.062, kSizeTol = 0.030;
constexpr double kPower = 0.99;
constexpr double kVLo = 0.85, kVHi = 1.15;
constexpr double kArLo = 0.05, kArHi = 0.15;
constexpr double kWaldRel = 1e-8, kWaldAbs = 1e-12;
constexpr double kVhat = 1e-12;
constexpr double kChiTol = 0.5;
constexpr double kOrder = 1e-9;
constexpr double kEnvLo = 13.5, kEnvHi = 17.0;
}  // namespace tol

struct Outcome {
    int id = 0;
    bool pass = false;
    std::string title;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Functional-ordering bookkeeping shared by every run below.
struct OrderingLedger {
    long checks = 0;
    long violations = 0;
    double worst = 0.0;

    void add(double avg, double expq, double sup) {
        ++checks;
        const double gap = std::max(avg - expq, expq - sup);
        if (gap > tol::kOrder) ++violations;
        worst = std::max(worst, gap);
    }

    void add_draws(const ExperimentResult& r, const std::string& kernel) {
        const auto& a = r.draws.at("avg/" + kernel);
        const auto& e = r.draws.at("expq(c=15)/" + kernel);
        const auto& s = r.draws.at("sup/" + kernel);
        for (std::size_t i = 0; i < a.size(); ++i) add(a[i], e[i], s[i]);
    }

    void add_path(const std::vector<double>& q) {
        add(path_mean(q.data(), q.size()), path_expq(q.data(), q.size(), 1.0, 15.0), path_max(q.data(), q.size()).value);
    }
};

OrderingLedger g_order;

ExperimentConfig desk_config(const std::string& dgp) {
    ExperimentConfig c;
    c.dgp = {dgp, 300, InnovationSpec::iid()};
    c.design = default_design_for(dgp);
    c.gamma_star = 0.35;
    c.kernels = {KernelSpec{KernelKind::Parzen, 14}, KernelSpec{KernelKind::Bartlett, 8}};
    c.tests = {TestSpec::sup(), TestSpec::avg(), TestSpec::expq(15)};
    c.levels = {0.05};
    c.reps = 500;
    c.seed = 1;
    // only ExpQ uses these; its critical values do not enter any criterion
    c.null_reps = 2000;
    c.null_resolution = 1000;
    c.keep_draws = true;
    return c;
}

// 1 -------------------------------------------------------------------------
Outcome critical_values_table() {
    Outcome o{1, false, "critical values (N=3600, reps=10000)", ""};
    LimitPathConfig cfg;
    cfg.resolution = 3600;
    cfg.reps = 10000;
    cfg.gamma_star = 0.35;
    const auto d35 = simulate_null(cfg, {TestSpec::sup(), TestSpec::avg()});
    cfg.gamma_star = 0.15;
    const auto d15 = simulate_null(cfg, {TestSpec::sup()});
    const double s5 = d35[0].critical_value(0.05);
    const double s1 = d35[0].critical_value(0.01);
    const double a5 = d35[1].critical_value(0.05);
    const double t5 = d15[0].critical_value(0.05);
    o.pass = std::abs(s5 - tol::kSup5_35) <= tol::kSup5_35Tol && std::abs(s1 - tol::kSup1_35) <= tol::kSup1_35Tol &&
             std::abs(a5 - tol::kAvg5_35) <= tol::kAvg5_35Tol && std::abs(t5 - tol::kSup5_15) <= tol::kSup5_15Tol;
    o.detail = "g*=0.35 sup5 " + fmt("%.4f", s5) + " (3.9090+-0.10), sup1 " + fmt("%.4f", s1) +
               " (4.2737+-0.12), avg5 " + fmt("%.4f", a5) + " (0.0493+-0.006); g*=0.15 sup5 " + fmt("%.4f", t5) +
               " (4.1123+-0.10)";
    return o;
}

// 2 -------------------------------------------------------------------------
double kernel_entry(int block, double g1, double g2) {
    switch (block) {
        case 0: return std::pow(std::min(g1, g2), 2);
        case 1: return g1 > g2 ? std::pow(g1 - g2, 2) : 0.0;
        default: return std::pow(1.0 - std::max(g1, g2), 2);
    }
}

Outcome covariance_kernel() {
    Outcome o{2, false, "(W, Wbar) covariance kernel on 20 probe points, 20000 paths", ""};
    const long n = 100;
    const int paths = 20000;
    const int probes = 20;
    // probe i/20 sits at lattice index 5i
    std::vector<std::vector<double>> w(probes, std::vector<double>(paths)), wb = w;
    for (int r = 0; r < paths; ++r) {
        RandomStream rng(20240501, static_cast<std::uint64_t>(r));
        const WPair p = simulate_w_pair_white_noise(n, rng);
        for (int i = 0; i < probes; ++i) {
            w[i][r] = p.w[static_cast<std::size_t>(5 * (i + 1))];
            wb[i][r] = p.wbar[static_cast<std::size_t>(5 * (i + 1))];
        }
    }
    int entries = 0, outside = 0;
    double worst = 0.0;
    for (int block = 0; block < 3; ++block) {
        for (int i = 0; i < probes; ++i) {
            for (int j = 0; j < probes; ++j) {
                if (block != 1 && j < i) continue;
                const auto& a = block == 2 ? wb[i] : w[i];
                const auto& b = block == 0 ? w[j] : wb[j];
                // zero-mean processes: covariance is the mean product
                double m = 0.0, m2 = 0.0;
                for (int r = 0; r < paths; ++r) {
                    const double v = a[r] * b[r];
                    m += v;
                    m2 += v * v;
                }
                m /= paths;
                const double se = std::sqrt(std::max(0.0, m2 / paths - m * m) / paths);
                const double target = kernel_entry(block, (i + 1) / 20.0, (j + 1) / 20.0);
                const double z = se > 0.0 ? std::abs(m - target) / se : (std::abs(m - target) < 1e-12 ? 0.0 : INFINITY);
                ++entries;
                if (z > tol::kCovSe) ++outside;
                worst = std::max(worst, z);
            }
        }
    }
    o.pass = outside == 0;
    o.detail = std::to_string(outside) + " of " + std::to_string(entries) + " entries beyond 3 SE (max |z| " +
               fmt("%.2f", worst) + ")";
    return o;
}

// 3, 4 ----------------------------------------------------------------------
Outcome null_size() {
    Outcome o{3, false, "null size DGP1 n=300 p=6 sup 5%", ""};
    const ExperimentResult r = run_experiment(desk_config("DGP1"));
    g_order.add_draws(r, "parzen:14");
    g_order.add_draws(r, "bartlett:8");
    const double pz = r.cell("sup", KernelKind::Parzen, 14, 0.05).rate();
    const double bt = r.cell("sup", KernelKind::Bartlett, 8, 0.05).rate();
    const bool ok_p = std::abs(pz - tol::kParzenSize) <= tol::kSizeTol;
    const bool ok_b = std::abs(bt - tol::kBartlettSize) <= tol::kSizeTol;
    o.pass = ok_p && ok_b;
    o.detail = "Parzen a0=14 " + fmt("%.3f", pz) + " (0.080+-0.030) " + (ok_p ? "ok" : "out") + "; Bartlett a0=8 " +
               fmt("%.3f", bt) + " (0.062+-0.030) " + (ok_b ? "ok" : "out") + "; failures " +
               std::to_string(r.failures);
    return o;
}

Outcome power() {
    Outcome o{4, true, "power DGP3/DGP5 n=300 p=6 sup 5%", ""};
    for (const char* dgp : {"DGP3", "DGP5"}) {
        const ExperimentResult r = run_experiment(desk_config(dgp));
        g_order.add_draws(r, "parzen:14");
        g_order.add_draws(r, "bartlett:8");
        const double pz = r.cell("sup", KernelKind::Parzen, 14, 0.05).rate();
        const double bt = r.cell("sup", KernelKind::Bartlett, 8, 0.05).rate();
        o.pass = o.pass && pz >= tol::kPower && bt >= tol::kPower;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + dgp + " Parzen " + fmt("%.4f", pz) + ", Bartlett " +
                    fmt("%.4f", bt);
    }
    o.detail += " (need >= 0.99)";
    return o;
}

// 5 -------------------------------------------------------------------------
Outcome har_consistency() {
    Outcome o{5, false, "mean V-hat, iid DGP1 n=4000 p=6, 200 reps", ""};
    ExperimentConfig c = desk_config("DGP1");
    c.dgp.n = 4000;
    c.reps = 200;
    c.kernels = {KernelSpec{KernelKind::Parzen, 14}};
    c.tests = {TestSpec::sup()};
    c.keep_draws = false;
    const ExperimentResult r = run_experiment(c);
    const auto& v = r.v_hats.at(0);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    o.pass = mean >= tol::kVLo && mean <= tol::kVHi && !v.empty();
    o.detail = "mean V-hat " + fmt("%.4f", mean) + " over " + std::to_string(v.size()) + " reps (need [0.85, 1.15])";
    return o;
}

// 6 -------------------------------------------------------------------------
Outcome correction_matters() {
    Outcome o{6, false, "ARDGP1 g*=0.15 n=300 AR(8): uncorrected > corrected, corrected in [0.05, 0.15]", ""};
    ExperimentConfig c = desk_config("ARDGP1");
    c.gamma_star = 0.15;
    c.kernels = {KernelSpec{KernelKind::Parzen, 38}, KernelSpec{KernelKind::None, 0}};
    const ExperimentResult r = run_experiment(c);
    g_order.add_draws(r, "parzen:38");
    g_order.add_draws(r, "none");
    const double corrected = r.cell("sup", KernelKind::Parzen, 38, 0.05).rate();
    const double raw = r.cell("sup", KernelKind::None, 0, 0.05).rate();
    o.pass = raw > corrected && corrected >= tol::kArLo && corrected <= tol::kArHi;
    o.detail = "uncorrected " + fmt("%.3f", raw) + ", Parzen a0=38 " + fmt("%.3f", corrected);
    return o;
}

// 7 -------------------------------------------------------------------------
Outcome sequential_limit() {
    Outcome o{7, false, "standardised Bessel sup quantiles approach Q sup quantiles, p = 5, 50, 500", ""};
    const double gs = 0.35;
    const long resolution = 200;
    LimitPathConfig lc;
    lc.resolution = resolution;
    lc.gamma_star = gs;
    lc.reps = 20000;
    lc.seed = 77;
    const NullDistribution q = simulate_null(lc, {TestSpec::sup()})[0];
    const std::vector<double> levels{0.10, 0.05, 0.01};
    std::vector<double> gaps;
    for (long p : {5L, 50L, 500L}) {
        BesselConfig bc;
        bc.p = p;
        bc.resolution = resolution;
        bc.reps = 10000;
        bc.seed = 78;
        const NullDistribution b = simulate_bessel_sup(bc, gs, true);
        double gap = 0.0;
        for (double a : levels) gap += std::abs(b.critical_value(a) - q.critical_value(a));
        gaps.push_back(gap / static_cast<double>(levels.size()));
    }
    o.pass = gaps[0] > gaps[1] && gaps[1] > gaps[2];
    o.detail = "mean |quantile gap| at 10/5/1%: p=5 " + fmt("%.4f", gaps[0]) + ", p=50 " + fmt("%.4f", gaps[1]) +
               ", p=500 " + fmt("%.4f", gaps[2]) + " (Q sup 5% " + fmt("%.4f", q.critical_value(0.05)) + ")";
    return o;
}

// 8 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
    Outcome o{8, false, "W and V-hat against brute-force oracles, 100 instances", ""};
    double worst_w = 0.0, worst_v = 0.0;
    long w_bad = 0, v_bad = 0, w_checks = 0, v_checks = 0;
    for (std::uint64_t i = 1; i <= 100; ++i) {
        const Index n = 20 + static_cast<Index>((i * 7) % 61);
        const Index p = 1 + static_cast<Index>(i % 3);
        const DesignMatrix d = oracle::random_design(n, p, 1000 + i);
        const VectorXd y = oracle::random_vector(n, 2000 + i);
        const BreakGrid g = make_grid(0.35, 0.05);
        for (VarianceMode mode : {VarianceMode::EickerWhite, VarianceMode::Homoskedastic}) {
            const BreakProcess bp = compute_break_process(d, y, g, mode);
            g_order.add_path(bp.q);
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double ref = oracle::wald(d.x, y, g.points[j], mode);
                const double err = std::abs(bp.wald[j] - ref);
                ++w_checks;
                if (err > tol::kWaldRel * std::abs(ref) + tol::kWaldAbs) ++w_bad;
                worst_w = std::max(worst_w, err / std::max(std::abs(ref), 1e-300));
            }
            for (KernelSpec k : {KernelSpec{KernelKind::Parzen, 3}, KernelSpec{KernelKind::Bartlett, 2}}) {
                for (ZetaMode z : {ZetaMode::OnesVector, ZetaMode::LastObs}) {
                    const HarEstimate h = estimate_har(d, y, mode, k, z);
                    const double ref = oracle::v_hat(h.zeta, k.kind, h.bandwidth);
                    const double err = std::abs(h.v_raw - ref);
                    ++v_checks;
                    if (err > tol::kVhat * std::max(1.0, std::abs(ref))) ++v_bad;
                    worst_v = std::max(worst_v, err / std::max(1.0, std::abs(ref)));
                }
            }
        }
    }
    o.pass = w_bad == 0 && v_bad == 0;
    o.detail = "W: " + std::to_string(w_bad) + "/" + std::to_string(w_checks) + " beyond 1e-8 rel (max rel " +
               fmt("%.2e", worst_w) + "); V-hat: " + std::to_string(v_bad) + "/" + std::to_string(v_checks) +
               " beyond 1e-12 (max " + fmt("%.2e", worst_v) + ")";
    return o;
}

// 9 -------------------------------------------------------------------------
Outcome chi_square() {
    Outcome o{9, false, "mean W(0.5), iid normal design n=2000 p=6, 500 reps", ""};
    const Index n = 2000, p = 6;
    double sum = 0.0;
    for (int r = 0; r < 500; ++r) {
        RandomStream rng(9, static_cast<std::uint64_t>(r));
        DesignMatrix d;
        d.x.resize(n, p);
        VectorXd y(n);
        for (Index t = 0; t < n; ++t) {
            d.x(t, 0) = 1.0;
            for (Index j = 1; j < p; ++j) d.x(t, j) = rng.normal();
            y(t) = rng.normal();
        }
        sum += wald_at(split_design(d, 0.5), y, VarianceMode::Homoskedastic).wald;
    }
    const double mean = sum / 500.0;
    o.pass = std::abs(mean - 6.0) <= tol::kChiTol;
    o.detail = "mean " + fmt("%.4f", mean) + " (need 6 +- 0.5)";
    return o;
}

// 10 ------------------------------------------------------------------------
Outcome functional_ordering() {
    Outcome o{10, false, "avg <= ExpQ(15) <= sup on every run", ""};
    for (PathConstruction pc : {PathConstruction::OrnsteinUhlenbeck, PathConstruction::WhiteNoise,
                                PathConstruction::Ito, PathConstruction::Pointwise}) {
        LimitPathConfig cfg;
        cfg.construction = pc;
        cfg.resolution = pc == PathConstruction::WhiteNoise ? 400 : 3600;
        for (std::uint64_t r = 0; r < 500; ++r) {
            RandomStream rng(10, r);
            g_order.add_path(simulate_q_path(cfg, rng));
        }
    }
    o.pass = g_order.violations == 0 && g_order.checks > 0;
    o.detail = std::to_string(g_order.violations) + " violations in " + std::to_string(g_order.checks) +
               " runs (largest excess " + fmt("%.2e", g_order.worst) + ")";
    return o;
}

// 11 ------------------------------------------------------------------------
Outcome envelope() {
    Outcome o{11, false, "power envelope P(c)=1/2 at n=300 p=6 g*=0.35, 300 reps", ""};
    EnvelopeConfig c;
    try {
        const EnvelopeResult r = power_envelope(c);
        double at15 = 0.0;
        for (std::size_t i = 0; i < r.c.size(); ++i)
            if (std::abs(r.c[i] - 15.0) < 1e-9) at15 = r.power[i];
        o.pass = *r.solution >= tol::kEnvLo && *r.solution <= tol::kEnvHi;
        o.detail = "c = " + fmt("%.3f", *r.solution) + " (need [13.5, 17]); power at c=15 " + fmt("%.3f", at15);
    } catch (const Error& e) {
        o.detail = e.what();
    }
    return o;
}

// 12 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

bool run_cli(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string(SBREAK_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

Outcome determinism() {
    Outcome o{12, true, "subcommand reruns byte-identical; quantiles thread invariant", ""};
    const fs::path dir = fs::temp_directory_path() / "sbreak_acceptance";
    fs::create_directories(dir);
    const fs::path sample = dir / "dgp2.csv";
    {
        RandomStream rng(12, 0);
        write_sample(sample.string(), gen_dgp({"DGP2", 300, InnovationSpec::iid()}, rng).sample);
    }
    struct Case {
        std::string name;
        std::string args;
        bool quantiles;
    };
    const std::string in = "-i " + sample.string() + " --covariates z1,z2";
    const std::vector<Case> cases{
        {"test-json", "test " + in + " --format json", false},
        {"test-expq", "test " + in + " --test expq:15 --cv simulate --null-reps 2000 --resolution 1000 --format json",
         true},
        {"test-plot", "test " + in + " --format csv-plotdata", false},
        {"critvals", "critvals --gamma-star 0.35,0.15 --reps 2000 --resolution 1000 --seed 5", true},
        {"mc", "mc --dgp DGP2 --n 200 --reps 40 --kernels parzen:14,none --tests sup,avg --format csv", false},
        {"envelope", "envelope --reps 40 --null-reps 300 --c-step 0.5", true},
    };
    std::vector<std::string> bad;
    for (const Case& c : cases) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "1", "3"}) {
            const fs::path out = dir / (c.name + "_" + std::to_string(outputs.size()) + ".out");
            const fs::path file = dir / (c.name + "_" + std::to_string(outputs.size()) + ".file");
            const bool writes_file = c.name == "envelope" || c.name == "critvals";
            const std::string args =
                c.args + " --threads " + threads + (writes_file ? " -o " + file.string() : std::string());
            if (!run_cli(args, out)) {
                bad.push_back(c.name + " (exit)");
                break;
            }
            outputs.push_back(slurp(out) + (writes_file ? slurp(file) : std::string()));
        }
        if (outputs.size() != 3) continue;
        if (outputs[0] != outputs[1] || outputs[0].empty()) bad.push_back(c.name + " rerun");
        if (c.quantiles && outputs[0] != outputs[2]) bad.push_back(c.name + " threads");
    }
    o.pass = bad.empty();
    if (bad.empty()) {
        o.detail = std::to_string(cases.size()) + " commands identical on rerun; quantile outputs identical at 1 and 3 threads";
    } else {
        for (const auto& b : bad) o.detail += (o.detail.empty() ? "differs: " : ", ") + b;
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::function<Outcome()>> criteria{
        {1, critical_values_table}, {2, covariance_kernel}, {3, null_size},      {4, power},
        {5, har_consistency},       {6, correction_matters}, {7, sequential_limit}, {8, oracle_equivalence},
        {9, chi_square},            {11, envelope},         {12, determinism},     {10, functional_ordering},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    // 10 last: it collects the statistics produced by the other runs.
    std::vector<int> order{1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 10};
    std::vector<Outcome> outcomes;
    for (int id : order) {
        if (!wanted.empty() && !wanted.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria.at(id)();
        } catch (const std::exception& e) {
            o = {id, false, "criterion " + std::to_string(id), std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "  criterion %d done in %.1f s\n", id, secs);
        outcomes.push_back(o);
    }
    std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
    int failed = 0;
    for (const Outcome& o : outcomes) {
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", o.id, o.title.c_str(), o.detail.c_str());
        if (!o.pass) ++failed;
    }
    std::printf("%zu criteria, %d failed\n", outcomes.size(), failed);
    return failed == 0 ? 0 : 1;
}
