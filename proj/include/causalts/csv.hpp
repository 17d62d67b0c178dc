#ifndef CAUSALTS_CSV_HPP
#define CAUSALTS_CSV_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace causalts {

// Lossless, locale-independent rendering of a double (shortest of %.17g that
// round-trips would be nicer but 17 significant digits is always exact).
std::string format_double(double v);

// Split one CSV line on commas. No quoting support: the formats used here never
// embed commas in fields.
std::vector<std::string> split_csv_line(const std::string& line);

// Parse a decimal cell; throws DataError tagged with (row, column-name) context.
double parse_cell(const std::string& cell, int row, const std::string& col_name);

// Write `m` as CSV with a header row of column names. When `row_labels` is
// non-empty the first column carries labels and the header gets a leading
// `label_header` cell (used for labeled square matrices like graphs).
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& col_names,
                      const std::vector<std::string>& row_labels = {},
                      const std::string& label_header = "");

struct LabeledMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> col_names;
    std::vector<std::string> row_labels;  // empty when the file had no label column
};

// Read a CSV with a header row; detects a leading label column by a non-numeric
// first data cell combined with `expect_row_labels`.
LabeledMatrix read_matrix_csv(const std::string& path, bool expect_row_labels);

}  // namespace causalts

#endif
