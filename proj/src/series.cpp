#include "causalts/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "causalts/csv.hpp"
#include "causalts/errors.hpp"

namespace causalts {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

SeriesFrame like(const SeriesFrame& src, Eigen::MatrixXd values, Eigen::Index row0) {
    SeriesFrame out;
    out.names = src.names;
    if (!src.timestamps.empty()) {
        out.timestamps.assign(src.timestamps.begin() + row0,
                              src.timestamps.begin() + row0 + values.rows());
    }
    out.values = std::move(values);
    return out;
}

}  // namespace

void SeriesFrame::validate() const {
    if (rows() < 1) throw DataError("series frame has no rows");
    if (cols() < 2) throw DataError("series frame needs at least 2 variables, got " +
                                    std::to_string(cols()));
    if (static_cast<Eigen::Index>(names.size()) != cols()) {
        throw DataError("series frame name count does not match column count");
    }
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) throw DataError("duplicate variable name: " + n);
    }
    if (!timestamps.empty() && static_cast<Eigen::Index>(timestamps.size()) != rows()) {
        throw DataError("timestamp count does not match row count");
    }
}

SeriesFrame load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) throw DataError("empty header in " + path);

    SeriesFrame frame;
    const bool has_dates = lower(header[0]) == "date";
    std::size_t first = has_dates ? 1 : 0;
    frame.names.assign(header.begin() + static_cast<std::ptrdiff_t>(first), header.end());

    std::vector<std::vector<double>> rows;
    int row_idx = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("ragged row " + std::to_string(row_idx) + " in " + path +
                            ": expected " + std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        }
        if (has_dates) frame.timestamps.push_back(cells[0]);
        std::vector<double> vals;
        vals.reserve(cells.size() - first);
        for (std::size_t c = first; c < cells.size(); ++c) {
            vals.push_back(parse_cell(cells[c], row_idx, header[c]));
        }
        rows.push_back(std::move(vals));
        ++row_idx;
    }
    frame.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(frame.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            frame.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    frame.validate();
    return frame;
}

void save_csv(const SeriesFrame& frame, const std::string& path) {
    frame.validate();
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    const bool has_dates = !frame.timestamps.empty();
    if (has_dates) out << "date,";
    for (std::size_t c = 0; c < frame.names.size(); ++c) {
        out << frame.names[c] << (c + 1 < frame.names.size() ? "," : "");
    }
    out << '\n';
    for (Eigen::Index r = 0; r < frame.rows(); ++r) {
        if (has_dates) out << frame.timestamps[static_cast<std::size_t>(r)] << ',';
        for (Eigen::Index c = 0; c < frame.cols(); ++c) {
            out << format_double(frame.values(r, c)) << (c + 1 < frame.cols() ? "," : "");
        }
        out << '\n';
    }
}

void SplitSpec::validate() const {
    if (train <= 0.0 || val <= 0.0 || test <= 0.0) {
        throw ConfigError("split fractions must be positive");
    }
    if (std::fabs(train + val + test - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

SplitFrames split_chrono(const SeriesFrame& frame, const SplitSpec& spec) {
    frame.validate();
    spec.validate();
    const auto total = frame.rows();
    const auto n_train = static_cast<Eigen::Index>(static_cast<double>(total) * spec.train);
    const auto n_test = static_cast<Eigen::Index>(static_cast<double>(total) * spec.test);
    const auto n_val = total - n_train - n_test;
    if (n_train < 1 || n_val < 1 || n_test < 1) {
        throw DataError("chronological split produced an empty subset (T=" + std::to_string(total) +
                        ")");
    }
    SplitFrames out;
    out.train = like(frame, frame.values.topRows(n_train), 0);
    out.val = like(frame, frame.values.middleRows(n_train, n_val), n_train);
    out.test = like(frame, frame.values.bottomRows(n_test), n_train + n_val);
    return out;
}

void Normalizer::fit(const SeriesFrame& frame) {
    if (fitted_) throw DataError("normalizer already fitted; refit would leak statistics");
    frame.validate();
    const auto n = static_cast<double>(frame.rows());
    mean_ = frame.values.colwise().mean();
    Eigen::MatrixXd centered = frame.values.rowwise() - mean_;
    std_ = (centered.array().square().colwise().sum() / n).sqrt();
    for (Eigen::Index c = 0; c < std_.size(); ++c) {
        if (!(std_(c) > 0.0)) {
            throw DataError("constant column cannot be normalized: " +
                            frame.names[static_cast<std::size_t>(c)]);
        }
    }
    fitted_ = true;
}

SeriesFrame Normalizer::apply(const SeriesFrame& frame) const {
    if (!fitted_) throw DataError("normalizer used before fit");
    if (frame.cols() != mean_.size()) throw DataError("normalizer dimension mismatch");
    SeriesFrame out = frame;
    out.values = (frame.values.rowwise() - mean_).array().rowwise() / std_.array();
    return out;
}

SeriesFrame Normalizer::invert(const SeriesFrame& frame) const {
    if (!fitted_) throw DataError("normalizer used before fit");
    if (frame.cols() != mean_.size()) throw DataError("normalizer dimension mismatch");
    SeriesFrame out = frame;
    out.values = (frame.values.array().rowwise() * std_.array()).rowwise() + mean_.array();
    return out;
}

int window_count(int len, int lookback, int horizon, int stride) {
    if (lookback < 1 || horizon < 1 || stride < 1) {
        throw ConfigError("window parameters must be >= 1");
    }
    int usable = len - lookback - horizon;
    if (usable < 0) return 0;
    return usable / stride + 1;
}

WindowSet::WindowSet(Eigen::MatrixXd data, int lookback, int horizon, int stride)
    : data_(std::move(data)), lookback_(lookback), horizon_(horizon), stride_(stride),
      count_(window_count(static_cast<int>(data_.rows()), lookback, horizon, stride)) {}

Eigen::Block<const Eigen::MatrixXd> WindowSet::history(int k) const {
    if (k < 0 || k >= count_) throw DataError("window index out of range");
    return data_.middleRows(static_cast<Eigen::Index>(k) * stride_, lookback_);
}

Eigen::Block<const Eigen::MatrixXd> WindowSet::future(int k) const {
    if (k < 0 || k >= count_) throw DataError("window index out of range");
    return data_.middleRows(static_cast<Eigen::Index>(k) * stride_ + lookback_, horizon_);
}

WindowSet make_windows(const SeriesFrame& frame, int lookback, int horizon, int stride) {
    frame.validate();
    return WindowSet(frame.values, lookback, horizon, stride);
}

}  // namespace causalts
