#include "sbreak/cv_table.hpp"

#include "sbreak/csv_io.hpp"
#include "sbreak/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "null_sim";

struct PublishedRow {
    double gamma_star;
    double sup[3];
    double avg[3];
};

// Levels 1%, 5%, 10%.
constexpr PublishedRow kPublished[] = {
    {0.05, {4.5514, 4.1835, 4.0155}, {0.0419, 0.0292, 0.0227}},
    {0.10, {4.5064, 4.1426, 3.9705}, {0.0432, 0.0306, 0.0239}},
    {0.15, {4.4575, 4.1123, 3.9507}, {0.0461, 0.0329, 0.0258}},
    {0.20, {4.4177, 4.0691, 3.8972}, {0.0495, 0.0356, 0.0276}},
    {0.25, {4.3695, 4.0195, 3.8472}, {0.0531, 0.0387, 0.0304}},
    {0.30, {4.3387, 3.9643, 3.7935}, {0.0612, 0.0432, 0.0335}},
    {0.35, {4.2737, 3.9090, 3.7254}, {0.0706, 0.0493, 0.0391}},
    {0.40, {4.1813, 3.8127, 3.6308}, {0.0867, 0.0624, 0.0485}},
    {0.45, {4.0743, 3.6477, 3.4492}, {0.1222, 0.0865, 0.0673}},
    {0.46, {3.9565, 3.5687, 3.3712}, {0.1344, 0.0966, 0.0758}},
    {0.47, {3.9105, 3.4913, 3.3001}, {0.1554, 0.1114, 0.0867}},
    {0.48, {3.8383, 3.3956, 3.2016}, {0.1863, 0.1326, 0.1040}},
    {0.49, {3.5843, 3.1842, 2.9705}, {0.2851, 0.1942, 0.1506}},
};

constexpr double kLevels[] = {0.01, 0.05, 0.10};

bool close(double a, double b) noexcept { return std::abs(a - b) < 1e-9; }

}  // namespace

CriticalValueTable CriticalValueTable::bundled() {
    std::vector<CvRow> rows;
    for (const auto& r : kPublished) {
        for (int i = 0; i < 3; ++i) rows.push_back({r.gamma_star, kLevels[i], r.sup[i], r.avg[i]});
    }
    return CriticalValueTable(std::move(rows));
}

CriticalValueTable CriticalValueTable::load(const std::string& path) {
    const CsvTable csv = read_csv(path);
    const std::vector<std::string> names = {"gamma_star", "level", "sup_cv", "avg_cv"};
    const MatrixXd values = csv.numeric_columns(names);
    std::vector<CvRow> rows;
    rows.reserve(static_cast<std::size_t>(values.rows()));
    for (Index i = 0; i < values.rows(); ++i) {
        rows.push_back({values(i, 0), values(i, 1), values(i, 2), values(i, 3)});
    }
    return CriticalValueTable(std::move(rows));
}

CriticalValueTable CriticalValueTable::from_environment() {
    if (const char* path = std::getenv("SBREAK_CV_TABLE"); path != nullptr && *path != '\0') return load(path);
    return bundled();
}

bool CriticalValueTable::contains(double gamma_star, double level) const noexcept {
    for (const auto& r : rows_) {
        if (close(r.gamma_star, gamma_star) && close(r.level, level)) return true;
    }
    return false;
}

const CvRow& CriticalValueTable::lookup(double gamma_star, double level) const {
    for (const auto& r : rows_) {
        if (close(r.gamma_star, gamma_star) && close(r.level, level)) return r;
    }
    std::ostringstream msg;
    msg << "no tabulated critical value for gamma_star=" << gamma_star << " level=" << level;
    throw Error(ErrorCode::InvalidConfig, kModule, msg.str());
}

std::string CriticalValueTable::to_csv() const {
    std::string out = "gamma_star,level,sup_cv,avg_cv\n";
    char line[128];
    for (const auto& r : rows_) {
        std::snprintf(line, sizeof line, "%.4f,%.4f,%.4f,%.4f\n", r.gamma_star, r.level, r.sup_cv, r.avg_cv);
        out += line;
    }
    return out;
}

void CriticalValueTable::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::FileNotFound, kModule, "cannot write " + path);
    f << to_csv();
}

}  // namespace sbreak
