#include "sbreak/experiment_config.hpp"

#include "sbreak/error.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "montecarlo";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, kModule, key + ": '" + v + "' is not a number");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long d = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, kModule, key + ": '" + v + "' is not an integer");
    }
}

std::pair<std::string, std::string> head_tail(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {text, ""};
    return {text.substr(0, colon), text.substr(colon + 1)};
}

}  // namespace

DesignSpec parse_design(const std::string& text) {
    const auto [kind, arg] = head_tail(text);
    if (kind == "poly") return DesignSpec::polynomial(static_cast<int>(to_long("design", arg.empty() ? "2" : arg)));
    if (kind == "ar") return DesignSpec::ar(static_cast<int>(to_long("design", arg)));
    if (kind == "raw") return DesignSpec::raw(true);
    if (kind == "raw-nointercept") return DesignSpec::raw(false);
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown design '" + text + "'");
}

VarianceMode parse_variance(const std::string& text) {
    if (text == "ew" || text == "eicker-white") return VarianceMode::EickerWhite;
    if (text == "homo" || text == "homoskedastic") return VarianceMode::Homoskedastic;
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown variance mode '" + text + "' (ew, homo)");
}

std::string to_string(VarianceMode mode) { return mode == VarianceMode::EickerWhite ? "ew" : "homo"; }

ZetaMode parse_zeta(const std::string& text) {
    if (text == "last-obs") return ZetaMode::LastObs;
    if (text == "ones-vector") return ZetaMode::OnesVector;
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown zeta mode '" + text + "' (last-obs, ones-vector)");
}

KernelSpec parse_kernel(const std::string& text) {
    const auto [kind, arg] = head_tail(text);
    KernelSpec k;
    if (kind == "none") {
        k.kind = KernelKind::None;
        k.a0 = 0.0;
        return k;
    }
    if (kind == "parzen") {
        k.kind = KernelKind::Parzen;
    } else if (kind == "bartlett") {
        k.kind = KernelKind::Bartlett;
    } else {
        throw Error(ErrorCode::InvalidConfig, kModule, "unknown kernel '" + text + "' (parzen:a0, bartlett:a0, none)");
    }
    if (arg.empty()) throw Error(ErrorCode::InvalidConfig, kModule, "kernel '" + text + "' needs a0, e.g. parzen:14");
    k.a0 = to_double("kernel", arg);
    if (!(k.a0 > 0.0)) throw Error(ErrorCode::InvalidConfig, kModule, "a0 must be positive");
    return k;
}

std::vector<KernelSpec> parse_kernels(const std::string& text) {
    std::vector<KernelSpec> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_kernel(item));
    return out;
}

TestSpec parse_test(const std::string& text) {
    const auto [name, arg] = head_tail(text);
    TestSpec t;
    t.functional = parse_functional(name);
    if (!arg.empty()) t.c = to_double("test", arg);
    t.validate();
    return t;
}

std::vector<TestSpec> parse_tests(const std::string& text) {
    std::vector<TestSpec> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_test(item));
    return out;
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double("levels", item));
    return out;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidConfig, kModule, "line " + std::to_string(lineno) + ": expected key = value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    ExperimentConfig c;
    bool design_given = false;
    std::string innovation = "iid";
    if (auto it = kv.find("innovation"); it != kv.end()) innovation = it->second;
    c.dgp.innovation = parse_innovation(innovation);
    for (const auto& [key, value] : kv) {
        if (key == "dgp") {
            c.dgp.name = value;
        } else if (key == "n") {
            c.dgp.n = to_long(key, value);
        } else if (key == "reps") {
            c.reps = to_long(key, value);
        } else if (key == "seed") {
            c.seed = static_cast<std::uint64_t>(to_long(key, value));
        } else if (key == "innovation") {
            // handled above
        } else if (key == "arch_omega" || key == "garch_omega") {
            c.dgp.innovation.omega = to_double(key, value);
        } else if (key == "arch_alpha" || key == "garch_alpha") {
            c.dgp.innovation.alpha = to_double(key, value);
        } else if (key == "garch_beta") {
            c.dgp.innovation.beta = to_double(key, value);
        } else if (key == "burn_in") {
            c.dgp.innovation.burn_in = to_long(key, value);
        } else if (key == "design") {
            c.design = parse_design(value);
            design_given = true;
        } else if (key == "gamma_star") {
            c.gamma_star = to_double(key, value);
        } else if (key == "step") {
            c.step = to_double(key, value);
        } else if (key == "variance") {
            c.variance = parse_variance(value);
        } else if (key == "zeta") {
            c.zeta = parse_zeta(value);
        } else if (key == "kernels") {
            c.kernels = parse_kernels(value);
        } else if (key == "tests") {
            c.tests = parse_tests(value);
        } else if (key == "levels") {
            c.levels = parse_levels(value);
        } else if (key == "cv") {
            if (value == "table") {
                c.cv_source = CvSource::Table;
            } else if (value == "simulate") {
                c.cv_source = CvSource::Simulate;
            } else {
                throw Error(ErrorCode::InvalidConfig, kModule, "cv must be 'table' or 'simulate'");
            }
        } else if (key == "null_reps") {
            c.null_reps = to_long(key, value);
        } else if (key == "null_resolution") {
            c.null_resolution = to_long(key, value);
        } else if (key == "construction") {
            c.construction = parse_construction(value);
        } else if (key == "threads") {
            c.threads = static_cast<unsigned>(to_long(key, value));
        } else {
            throw Error(ErrorCode::InvalidConfig, kModule, "unknown key '" + key + "'");
        }
    }
    if (!design_given) c.design = default_design_for(c.dgp.name);
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::FileNotFound, kModule, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_experiment_config(ss.str());
}

}  // namespace sbreak
