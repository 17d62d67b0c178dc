#include "causalts/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "causalts/errors.hpp"

namespace causalts {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& cell, int row, const std::string& col_name) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    // Trailing whitespace is tolerated; any other residue is a parse failure.
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (end == begin || (end && *end != '\0')) {
        throw DataError("non-numeric cell at (" + std::to_string(row) + "," + col_name + "): '" +
                        cell + "'");
    }
    return v;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& col_names,
                      const std::vector<std::string>& row_labels,
                      const std::string& label_header) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    const bool labeled = !row_labels.empty();
    if (labeled && static_cast<Eigen::Index>(row_labels.size()) != m.rows()) {
        throw DataError("row label count mismatch writing " + path);
    }
    if (static_cast<Eigen::Index>(col_names.size()) != m.cols()) {
        throw DataError("column name count mismatch writing " + path);
    }
    if (labeled) out << label_header << ',';
    for (std::size_t c = 0; c < col_names.size(); ++c) {
        out << col_names[c] << (c + 1 < col_names.size() ? "," : "");
    }
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (labeled) out << row_labels[static_cast<std::size_t>(r)] << ',';
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << format_double(m(r, c)) << (c + 1 < m.cols() ? "," : "");
        }
        out << '\n';
    }
}

LabeledMatrix read_matrix_csv(const std::string& path, bool expect_row_labels) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);

    LabeledMatrix out;
    std::vector<std::vector<double>> rows;
    int row_idx = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("ragged row " + std::to_string(row_idx) + " in " + path + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        }
        std::size_t first = 0;
        if (expect_row_labels) {
            out.row_labels.push_back(cells[0]);
            first = 1;
        }
        std::vector<double> vals;
        vals.reserve(cells.size() - first);
        for (std::size_t c = first; c < cells.size(); ++c) {
            vals.push_back(parse_cell(cells[c], row_idx, header[c]));
        }
        rows.push_back(std::move(vals));
        ++row_idx;
    }
    out.col_names.assign(header.begin() + (expect_row_labels ? 1 : 0), header.end());
    out.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(out.col_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return out;
}

}  // namespace causalts
