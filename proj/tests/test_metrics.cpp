#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "mmci/metrics.hpp"

using namespace mmci;

TEST_CASE("acc7 with integer rounding") {
    // 1.4 and 1.0 both round to class 1
    CHECK(acc7({1.4}, {1.0}) == doctest::Approx(100.0));
    // 2.6 rounds to 3, 2.4 rounds to 2
    CHECK(acc7({2.6}, {2.4}) == doctest::Approx(0.0));
    CHECK(acc7({-3.0, 0.0, 3.0}, {-3.0, 0.0, 3.0}) == doctest::Approx(100.0));
    // out-of-range predictions clamp into [-3, 3]
    CHECK(acc7({5.0}, {3.0}) == doctest::Approx(100.0));
    CHECK(acc7({1.0, 2.0}, {1.0, 3.0}) == doctest::Approx(50.0));
}

TEST_CASE("acc7 class indices") {
    CHECK(acc7_class(-3.0, Acc7Mode::RoundToInteger) == 0);
    CHECK(acc7_class(0.0, Acc7Mode::RoundToInteger) == 3);
    CHECK(acc7_class(3.0, Acc7Mode::RoundToInteger) == 6);
    CHECK(acc7_class(1.49, Acc7Mode::RoundToInteger) == 4);

    // equal intervals split [-3, 3] into seven bins of width 6/7
    CHECK(acc7_class(-3.0, Acc7Mode::EqualIntervals) == 0);
    CHECK(acc7_class(3.0, Acc7Mode::EqualIntervals) == 6);
    CHECK(acc7_class(0.0, Acc7Mode::EqualIntervals) == 3);
    CHECK(acc7_class(-3.0 + 6.0 / 7.0 + 1e-9, Acc7Mode::EqualIntervals) == 1);
}

TEST_CASE("acc2 and F1 on perfect and inverted predictions") {
    std::vector<double> labels = {-2.0, -1.0, 1.0, 2.0};
    auto perfect = acc2_f1(labels, labels, Acc2Mode::IncludeZero);
    CHECK(perfect.first == doctest::Approx(100.0));
    CHECK(perfect.second == doctest::Approx(100.0));

    std::vector<double> inverted = {2.0, 1.0, -1.0, -2.0};
    auto bad = acc2_f1(inverted, labels, Acc2Mode::IncludeZero);
    CHECK(bad.first == doctest::Approx(0.0));
    CHECK(bad.second == doctest::Approx(0.0));
}

TEST_CASE("acc2 and F1 on a mixed case") {
    // one false positive out of three: acc 2/3, weighted F1 = 2/3
    std::vector<double> labels = {-1.0, -1.0, 1.0};
    std::vector<double> pred = {-1.0, 1.0, 1.0};
    auto [acc, f1] = acc2_f1(pred, labels, Acc2Mode::IncludeZero);
    CHECK(acc == doctest::Approx(100.0 * 2.0 / 3.0));
    // neg class: P=1, R=1/2, F1=2/3, weight 2/3; pos: P=1/2, R=1, F1=2/3
    CHECK(f1 == doctest::Approx(100.0 * 2.0 / 3.0));
}

TEST_CASE("exclude-zero mode drops zero-label samples") {
    std::vector<double> labels = {0.0, 0.0, 1.0, -1.0};
    std::vector<double> pred = {-2.0, 2.0, 1.0, -1.0};
    auto [acc, f1] = acc2_f1(pred, labels, Acc2Mode::ExcludeZero);
    CHECK(acc == doctest::Approx(100.0));
    CHECK(f1 == doctest::Approx(100.0));
    // include-zero: zero labels count as non-negative
    auto [acc_in, f1_in] = acc2_f1(pred, labels, Acc2Mode::IncludeZero);
    CHECK(acc_in == doctest::Approx(75.0));
    (void)f1_in;
}

TEST_CASE("acc2 hand-built two-mode example") {
    // labels: 6 negative, 4 positive; predictions miss one of each
    std::vector<double> labels = {-2, -2, -1, -1, -1, -3, 1, 2, 2, 3};
    std::vector<double> pred = {-2, -2, -1, -1, -1, 1, -1, 2, 2, 3};
    auto [acc, f1] = acc2_f1(pred, labels, Acc2Mode::ExcludeZero);
    CHECK(acc == doctest::Approx(80.0));
    // neg: P=5/6, R=5/6, F1=5/6, weight .6; pos: P=3/4, R=3/4, F1=3/4, weight .4
    CHECK(f1 == doctest::Approx(100.0 * (0.6 * 5.0 / 6.0 + 0.4 * 0.75)));
}

TEST_CASE("mae") {
    CHECK(mae({1, 2, 3}, {1, 2, 3}) == doctest::Approx(0.0));
    CHECK(mae({1, 2, 3}, {2, 2, 2}) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS((void)mae({1.0}, {1.0, 2.0}), dimension_error);
}

TEST_CASE("correlation") {
    std::vector<double> x = {1, 2, 3, 4};
    CHECK(corr(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> neg = {4, 3, 2, 1};
    CHECK(corr(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    // constant side has zero variance
    CHECK_THROWS_AS((void)corr({1, 2, 3}, {2, 2, 2}), std::domain_error);
}

TEST_CASE("evaluate writes NA for undefined correlation") {
    std::vector<double> labels = {2, 2, 2};
    std::vector<double> pred = {1, 2, 3};
    auto rep = evaluate(pred, labels);
    CHECK(!rep.corr.has_value());
    CHECK(rep.mae == doctest::Approx(2.0 / 3.0));
    CHECK(rep.n_total == 3);
    auto row = rep.csv_row();
    CHECK(row.find("NA") != std::string::npos);
    // header and row have the same number of fields
    auto count = [](const std::string& s) {
        return 1 + std::count(s.begin(), s.end(), ',');
    };
    CHECK(count(MetricsReport::csv_header()) == count(row));
}
