#pragma once

#include "sbreak/design.hpp"

#include <string>
#include <vector>

namespace sbreak {

/// Raw text cells of a CSV file with a header row.
struct CsvTable {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// @throws Error(ColumnMissing) when name is not in the header.
    [[nodiscard]] std::size_t column_index(const std::string& name) const;

    /**
     * @brief Numeric matrix of the named columns, in the given order.
     * @throws Error(NonNumericCell) naming the 1-based data row and the column.
     */
    [[nodiscard]] MatrixXd numeric_columns(const std::vector<std::string>& names) const;
};

/// @throws Error(FileNotFound) when the file cannot be opened.
[[nodiscard]] CsvTable read_csv(const std::string& path);

/// Response plus covariates; covariate order follows `covariates`.
[[nodiscard]] RawSample ingest_csv(const std::string& path, const std::string& response,
                                   const std::vector<std::string>& covariates);

/// Writes columns with 17 significant digits so values survive a round trip.
void write_csv(const std::string& path, const std::vector<std::string>& header, const MatrixXd& values);

/// Writes y as column "y" followed by z1..zk.
void write_sample(const std::string& path, const RawSample& sample);

/// "%.17g" formatting.
[[nodiscard]] std::string format_double(double v);

}  // namespace sbreak
