#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sbreak {

struct CvRow {
    double gamma_star = 0.0;
    double level = 0.0;
    double sup_cv = 0.0;
    double avg_cv = 0.0;
};

/**
 * @brief Asymptotic sup/avg critical values by trimming and level.
 *
 * CSV layout: header "gamma_star,level,sup_cv,avg_cv", values with four
 * decimals.
 */
class CriticalValueTable {
public:
    CriticalValueTable() = default;
    explicit CriticalValueTable(std::vector<CvRow> rows) : rows_(std::move(rows)) {}

    /// The table compiled into the library (trimming 0.05 to 0.49; levels 1%, 5%, 10%).
    [[nodiscard]] static CriticalValueTable bundled();
    /// Reads a CSV file in the layout above.
    [[nodiscard]] static CriticalValueTable load(const std::string& path);
    /// Table named by SBREAK_CV_TABLE if set, otherwise the bundled one.
    [[nodiscard]] static CriticalValueTable from_environment();

    [[nodiscard]] const std::vector<CvRow>& rows() const noexcept { return rows_; }
    /// @throws Error(InvalidConfig) when (gamma_star, level) is not tabulated.
    [[nodiscard]] const CvRow& lookup(double gamma_star, double level) const;
    [[nodiscard]] bool contains(double gamma_star, double level) const noexcept;

    [[nodiscard]] std::string to_csv() const;
    void save(const std::string& path) const;

private:
    std::vector<CvRow> rows_;
};

}  // namespace sbreak
