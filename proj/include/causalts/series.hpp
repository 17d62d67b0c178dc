#ifndef CAUSALTS_SERIES_HPP
#define CAUSALTS_SERIES_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace causalts {

// A multivariate series: rows are time steps in chronological order, columns are
// variables. Timestamps are carried as opaque strings when the source CSV has a
// leading "date" column; they never participate in computation.
struct SeriesFrame {
    Eigen::MatrixXd values;              // T x D
    std::vector<std::string> names;      // D column names
    std::vector<std::string> timestamps; // empty or size T

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    // Enforces T >= 1, D >= 2, unique names, timestamp length.
    void validate() const;
};

// Load a comma-separated file with a header row. A first column whose header is
// "date" (case-insensitive) is treated as timestamps; all other cells must parse
// as decimal numbers.
SeriesFrame load_csv(const std::string& path);

void save_csv(const SeriesFrame& frame, const std::string& path);

struct SplitSpec {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;

    // Fractions must be positive and sum to 1 within 1e-9.
    void validate() const;
};

struct SplitFrames {
    SeriesFrame train;
    SeriesFrame val;
    SeriesFrame test;
};

// Chronological split: train rows first, then val, then test. Row counts are
// floor(T*train) and floor(T*test), with val taking the remainder, so e.g.
// T=17420 at (0.6,0.2,0.2) gives (10452,3484,3484). Throws if any split is empty.
SplitFrames split_chrono(const SeriesFrame& frame, const SplitSpec& spec);

// Per-column z-score transform. Statistics come from exactly one fit() call
// (the training split); apply/invert refuse to run unfitted.
class Normalizer {
public:
    void fit(const SeriesFrame& frame);
    bool fitted() const { return fitted_; }

    SeriesFrame apply(const SeriesFrame& frame) const;
    SeriesFrame invert(const SeriesFrame& frame) const;

    const Eigen::RowVectorXd& mean() const { return mean_; }
    const Eigen::RowVectorXd& std() const { return std_; }

private:
    Eigen::RowVectorXd mean_;
    Eigen::RowVectorXd std_;
    bool fitted_ = false;
};

// Sliding lookback/horizon windows over one contiguous frame. Window k covers
// history rows [k*stride, k*stride + lookback) and future rows
// [k*stride + lookback, k*stride + lookback + horizon); windows never reach past
// the frame, so they cannot cross split boundaries by construction.
class WindowSet {
public:
    WindowSet(Eigen::MatrixXd data, int lookback, int horizon, int stride);

    int size() const { return count_; }
    int lookback() const { return lookback_; }
    int horizon() const { return horizon_; }
    Eigen::Index n_vars() const { return data_.cols(); }

    // lookback x D block for window k.
    Eigen::Block<const Eigen::MatrixXd> history(int k) const;
    // horizon x D block for window k.
    Eigen::Block<const Eigen::MatrixXd> future(int k) const;

private:
    Eigen::MatrixXd data_;
    int lookback_;
    int horizon_;
    int stride_;
    int count_;
};

// Number of windows a frame of `len` rows yields: floor((len - lookback - horizon)
// / stride) + 1, or 0 when the frame is too short.
int window_count(int len, int lookback, int horizon, int stride);

WindowSet make_windows(const SeriesFrame& frame, int lookback, int horizon, int stride = 1);

}  // namespace causalts

#endif
