#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "yieldcast/metrics.hpp"
#include "yieldcast/rng.hpp"

#include "test_util.hpp"

using namespace yieldcast;
using test_util::TempDir;
using test_util::read_file;

namespace {

// Brute-force references computed with long double accumulation; these live
// only in the tests and share no code with the library implementations.
long double brute_pearson(const Vector& x, const Vector& y)
{
    const long double n = static_cast<long double>(x.size());
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const long double a = x[i], b = y[i];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    return (n * sxy - sx * sy)
           / (std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy));
}

long double brute_mape(const Vector& pred, const Vector& actual)
{
    long double total = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        total += std::abs((static_cast<long double>(pred[i]) - actual[i]) / actual[i]);
    }
    return 100.0L * total / static_cast<long double>(pred.size());
}

long double brute_rmse(const Vector& pred, const Vector& actual)
{
    long double total = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        const long double d = static_cast<long double>(pred[i]) - actual[i];
        total += d * d;
    }
    return std::sqrt(total / static_cast<long double>(pred.size()));
}

Vector random_vector(Rng& rng, int n, double lo, double hi)
{
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = rng.uniform(lo, hi);
    }
    return v;
}

}  // namespace

TEST_CASE("pearson basics")
{
    const Vector a{{1.0, 2.0, 4.0, 8.0, 9.0}};
    CHECK(pearson(a, a) == Catch::Approx(1.0).epsilon(1e-12));

    const Vector negated = (-a).eval();
    const Vector shifted = (negated.array() + 20.0).matrix();
    CHECK(pearson(shifted, a) == Catch::Approx(-1.0).epsilon(1e-12));

    SECTION("length-5 fixture matches the direct covariance formula")
    {
        const Vector x{{3.1, 0.2, 5.5, 2.2, 4.9}};
        const Vector y{{2.0, 1.1, 6.3, 2.0, 3.3}};
        CHECK(pearson(x, y)
              == Catch::Approx(static_cast<double>(brute_pearson(x, y))).epsilon(1e-12));
    }

    SECTION("degenerate inputs")
    {
        CHECK_THROWS_AS(pearson(Vector{{1.0}}, Vector{{1.0}}), DomainError);
        CHECK_THROWS_AS(pearson(a, Vector::Constant(5, 3.0)), DomainError);
        CHECK_THROWS_AS(pearson(a, Vector::Zero(4)), DomainError);
    }
}

TEST_CASE("mape basics")
{
    CHECK(mape(Vector{{100.0, 250.0}}, Vector{{100.0, 250.0}}) == 0.0);
    CHECK(mape(Vector{{110.0}}, Vector{{100.0}}) == Catch::Approx(10.0));
    CHECK(mape(Vector{{110.0, 90.0}}, Vector{{100.0, 100.0}}) == Catch::Approx(10.0));
    CHECK_THROWS_AS(mape(Vector{{1.0}}, Vector{{0.0}}), DomainError);
}

TEST_CASE("rmse basics")
{
    CHECK(rmse(Vector{{5.0, 6.0}}, Vector{{5.0, 6.0}}) == 0.0);
    CHECK(rmse(Vector{{3.0}}, Vector{{0.0}}) == 3.0);
    const Vector x{{1.5, -2.0, 4.0}};
    const Vector y{{0.5, 2.0, 1.0}};
    CHECK(rmse(x, y) == Catch::Approx(static_cast<double>(brute_rmse(x, y))).epsilon(1e-14));
}

TEST_CASE("metrics agree with brute-force implementations on random vectors")
{
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(200));
        const Vector pred = random_vector(rng, n, 10.0, 5000.0);
        const Vector actual = random_vector(rng, n, 10.0, 5000.0);

        const double p = pearson(pred, actual);
        const double m = mape(pred, actual);
        const double r = rmse(pred, actual);
        CHECK(std::abs(p - static_cast<double>(brute_pearson(pred, actual)))
              <= 1e-10 * std::max(1.0, std::abs(p)));
        CHECK(std::abs(m - static_cast<double>(brute_mape(pred, actual))) <= 1e-10 * m);
        CHECK(std::abs(r - static_cast<double>(brute_rmse(pred, actual))) <= 1e-10 * r);
    }
}

TEST_CASE("pearson is invariant under positive affine maps")
{
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(40));
        const Vector pred = random_vector(rng, n, 0.0, 100.0);
        const Vector actual = random_vector(rng, n, 0.0, 100.0);
        const double a = rng.uniform(0.1, 10.0);
        const double b = rng.uniform(-50.0, 50.0);
        const Vector mapped = (a * pred.array() + b).matrix();
        CHECK(std::abs(pearson(mapped, actual) - pearson(pred, actual)) < 1e-12);
    }
}

TEST_CASE("mape is invariant under joint positive scaling")
{
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(40));
        const Vector pred = random_vector(rng, n, 1.0, 100.0);
        const Vector actual = random_vector(rng, n, 1.0, 100.0);
        const double k = rng.uniform(0.01, 1000.0);
        CHECK(mape((k * pred.array()).matrix(), (k * actual.array()).matrix())
              == Catch::Approx(mape(pred, actual)).epsilon(1e-12));
    }
}

TEST_CASE("scatter_export writes the documented columns")
{
    TempDir tmp;
    const Vector pred{{2500.5, 3100.0}};
    const Vector actual{{2400.0, 3300.25}};
    scatter_export(pred, actual, {"M1", "M2"}, tmp.file("scatter.csv"));

    const std::string content = read_file(tmp.file("scatter.csv"));
    CHECK(content.rfind("municipality_id,actual_kg_ha,predicted_kg_ha\n", 0) == 0);
    CHECK(content.find("M1,2400,2500.5\n") != std::string::npos);
    CHECK(content.find("M2,3300.25,3100\n") != std::string::npos);

    SECTION("unwritable path")
    {
        CHECK_THROWS_AS(
            scatter_export(pred, actual, {"M1", "M2"}, tmp.path / "missing" / "scatter.csv"),
            IoError);
    }

    SECTION("misaligned inputs")
    {
        CHECK_THROWS_AS(scatter_export(pred, actual, {"M1"}, tmp.file("x.csv")), DomainError);
    }
}

TEST_CASE("run report aggregates are recomputable from the per-run list")
{
    RunReport report;
    report.crop = "cotton";
    report.test_year = 2018;
    report.config_fingerprint = "deadbeef";
    const std::vector<std::pair<double, double>> values = {
        {0.92, 29.0}, {0.93, 28.5}, {0.91, 30.0}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        RunOutcome run;
        run.seed = 100 + i;
        run.ok = true;
        run.result = EvalResult{values[i].first, values[i].second, 500.0, 223};
        report.runs.push_back(run);
    }
    RunOutcome failed;
    failed.seed = 103;
    failed.ok = false;
    failed.error = "diverged";
    report.runs.push_back(failed);

    report.recompute_aggregates();
    CHECK(report.completed == 3);
    CHECK(report.mean_correlation == Catch::Approx((0.92 + 0.93 + 0.91) / 3));
    CHECK(report.max_correlation == 0.93);
    CHECK(report.min_mape == 28.5);

    const double mu = report.mean_correlation;
    const double expected_sigma = std::sqrt(
        ((0.92 - mu) * (0.92 - mu) + (0.93 - mu) * (0.93 - mu) + (0.91 - mu) * (0.91 - mu)) / 3);
    CHECK(report.std_correlation == Catch::Approx(expected_sigma).epsilon(1e-12));

    SECTION("single run has zero spread")
    {
        RunReport one;
        one.runs.push_back(report.runs[0]);
        one.recompute_aggregates();
        CHECK(one.mean_correlation == 0.92);
        CHECK(one.std_correlation == 0.0);
    }

    SECTION("json round trip preserves runs and aggregates")
    {
        const RunReport loaded = report_from_json(report_to_json(report));
        CHECK(loaded.crop == report.crop);
        CHECK(loaded.runs.size() == report.runs.size());
        CHECK(loaded.mean_correlation == Catch::Approx(report.mean_correlation));
        CHECK(loaded.runs[3].ok == false);
        CHECK(loaded.runs[3].error == "diverged");
    }
}
