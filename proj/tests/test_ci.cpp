#include <cmath>

#include "causalts/ci.hpp"
#include "causalts/rng.hpp"
#include "causalts/scm.hpp"
#include "doctest.h"

using namespace causalts;

TEST_SUITE("ci") {

TEST_CASE("fisher z statistic closed-form values") {
    // atanh(0.5) = ln(3)/2; with n=103 and |Z|=0 the scale is sqrt(100) = 10.
    CHECK(fisher_z_statistic(0.5, 103, 0) ==
          doctest::Approx(5.4930614433405485).epsilon(1e-14));
    // Symmetric in the sign of r.
    CHECK(fisher_z_statistic(-0.5, 103, 0) == fisher_z_statistic(0.5, 103, 0));
    // Degrees of freedom enter through n - |Z| - 3.
    CHECK(fisher_z_statistic(0.3, 28, 5) ==
          doctest::Approx(std::atanh(0.3) * std::sqrt(20.0)).epsilon(1e-14));
    CHECK(fisher_z_statistic(0.0, 50, 0) == 0.0);
}

TEST_CASE("chain population: conditioning on the middle removes dependence") {
    Dag d(3, {{0, 1}, {1, 2}});
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = 1.0;
    w(1, 2) = 1.0;
    LinearScm scm(d, w, Eigen::VectorXd::Ones(3));
    SeriesFrame f = sample_iid(scm, 20000, 42);
    FisherZTest ci(f, 0.05);

    CHECK(!ci.test(0, 1, {}).independent);
    CHECK(!ci.test(0, 2, {}).independent);
    CiResult sep = ci.test(0, 2, {1});
    CHECK(sep.independent);
    CHECK(sep.p_value > 0.05);

    // collider: marginally independent, dependent given the child
    Dag dc(3, {{0, 2}, {1, 2}});
    Eigen::MatrixXd wc = Eigen::MatrixXd::Zero(3, 3);
    wc(0, 2) = 1.0;
    wc(1, 2) = 1.0;
    SeriesFrame fc = sample_iid(LinearScm(dc, wc, Eigen::VectorXd::Ones(3)), 20000, 43);
    FisherZTest cic(fc, 0.05);
    CHECK(cic.test(0, 1, {}).independent);
    CHECK(!cic.test(0, 1, {2}).independent);
}

TEST_CASE("queries are deterministic") {
    Rng rng(5);
    Eigen::MatrixXd data(500, 4);
    for (int r = 0; r < 500; ++r)
        for (int c = 0; c < 4; ++c) data(r, c) = rng.stream(static_cast<std::uint64_t>(r * 4 + c)).normal();
    FisherZTest ci(data, 0.05);
    CiResult a = ci.test(0, 3, {1, 2});
    CiResult b = ci.test(0, 3, {1, 2});
    CHECK(a.independent == b.independent);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("singular conditioning set reports a warning, treated as dependent") {
    Eigen::MatrixXd data(100, 3);
    Rng rng(9);
    for (int r = 0; r < 100; ++r) {
        data(r, 0) = rng.stream(static_cast<std::uint64_t>(r)).normal();
        data(r, 1) = rng.stream(static_cast<std::uint64_t>(r) + 1000).normal();
        data(r, 2) = data(r, 1);  // exact duplicate
    }
    FisherZTest ci(data, 0.05);
    CiResult r = ci.test(0, 1, {2});
    CHECK(r.warning);
    CHECK(!r.independent);
}

TEST_CASE("oracle backend answers by d-separation") {
    Dag d(4, {{0, 1}, {1, 2}, {0, 3}});
    OracleCiTest ci(d);
    CHECK(ci.n_vars() == 4);
    CHECK(ci.test(0, 2, {1}).independent);
    CHECK(!ci.test(0, 2, {}).independent);
    CHECK(ci.test(3, 2, {0}).independent);
}

}  // TEST_SUITE
