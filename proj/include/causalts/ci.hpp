#ifndef CAUSALTS_CI_HPP
#define CAUSALTS_CI_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "causalts/dag.hpp"
#include "causalts/series.hpp"

namespace causalts {

struct CiResult {
    bool independent = false;
    double p_value = 0.0;
    bool warning = false;  // singular conditioning covariance
};

// Conditional-independence backend consumed by the PC search. Implementations
// must be deterministic: identical queries yield identical answers.
class CiTest {
public:
    virtual ~CiTest() = default;
    virtual CiResult test(int a, int b, const std::vector<int>& z) = 0;
    virtual int n_vars() const = 0;
};

// Fisher-z test on the sample correlation matrix. The partial correlation of
// (a, b) given Z comes from the precision of the (2+|Z|)-variable correlation
// submatrix; z = atanh(r) scaled by sqrt(n - |Z| - 3) is compared against the
// standard normal. Independence is declared when p > alpha. A singular
// conditioning submatrix is reported as dependent with p = 0 and warning set.
class FisherZTest : public CiTest {
public:
    FisherZTest(const Eigen::MatrixXd& data, double alpha);
    FisherZTest(const SeriesFrame& frame, double alpha);

    CiResult test(int a, int b, const std::vector<int>& z) override;
    int n_vars() const override { return static_cast<int>(corr_.rows()); }

    double alpha() const { return alpha_; }

private:
    void init(const Eigen::MatrixXd& data);

    Eigen::MatrixXd corr_;
    int n_samples_ = 0;
    double alpha_;
};

// Computes the Fisher-z statistic sqrt(n - |Z| - 3) * |atanh(r)|.
double fisher_z_statistic(double r, int n, int z_size);

// Exact oracle backend answering queries by d-separation in a known DAG.
class OracleCiTest : public CiTest {
public:
    explicit OracleCiTest(const Dag& dag) : dag_(dag) {}

    CiResult test(int a, int b, const std::vector<int>& z) override {
        bool sep = d_separated(dag_, a, b, z);
        return {sep, sep ? 1.0 : 0.0, false};
    }
    int n_vars() const override { return dag_.n_vars(); }

private:
    Dag dag_;
};

}  // namespace causalts

#endif
