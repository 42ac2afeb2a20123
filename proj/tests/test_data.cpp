#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "wavecls/dataset.hpp"

using namespace wavecls;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& content) {
        static int counter = 0;
        path = "test_data_tmp_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv loading maps labels and validates cells") {
    TempCsv f("x1,x2,cls\n1,2,A\n3,4,B\n5,6,A\n");
    const Dataset d = load_csv(f.path, "cls", "A");
    CHECK(d.size() == 3);
    CHECK(d.dim() == 2);
    CHECK(d.y(0) == 1);
    CHECK(d.y(1) == -1);
    CHECK(d.y(2) == 1);
    CHECK(d.feature_names == std::vector<std::string>{"x1", "x2"});
    CHECK(d.X(2, 1) == 6.0);
}

TEST_CASE("csv label column by index, no header") {
    TempCsv f("1,2,1\n3,4,-1\n");
    const Dataset d = load_csv(f.path, "2", "1");
    CHECK(d.size() == 2);
    CHECK(d.y(0) == 1);
    CHECK(d.y(1) == -1);
}

TEST_CASE("csv errors carry row context") {
    TempCsv nan_cell("a,b,label\n1,NaN,1\n");
    CHECK_THROWS_WITH_AS(load_csv(nan_cell.path, "label", "1"),
                         doctest::Contains("row 2"), data_error);

    TempCsv header_only("a,b,label\n");
    CHECK_THROWS_AS(load_csv(header_only.path, "label", "1"), data_error);

    TempCsv ragged("a,b,label\n1,2,1\n3,1\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged.path, "label", "1"),
                         doctest::Contains("row 3"), data_error);

    TempCsv ok("a,b,label\n1,2,1\n");
    CHECK_THROWS_AS(load_csv(ok.path, "missing", "1"), data_error);
    CHECK_THROWS_AS(load_csv("no_such_file.csv", "label", "1"), data_error);
}

TEST_CASE("min-max scaling") {
    Dataset d;
    d.X.resize(3, 2);
    d.X << 0, 7, 5, 7, 10, 7;
    d.y.resize(3);
    d.y << 1, -1, 1;
    const MinMaxScaler s = MinMaxScaler::fit(d);
    const Dataset n = s.apply(d);
    CHECK(n.X(0, 0) == 0.0);
    CHECK(n.X(1, 0) == 0.5);
    CHECK(n.X(2, 0) == 1.0);
    // constant feature maps to 0
    CHECK(n.X.col(1).cwiseAbs().maxCoeff() == 0.0);
    // train data lands in [0,1] exactly
    CHECK(n.X.minCoeff() >= 0.0);
    CHECK(n.X.maxCoeff() <= 1.0);

    Dataset t;
    t.X.resize(1, 2);
    t.X << 12, 9;
    t.y.resize(1);
    t.y << 1;
    CHECK(s.apply(t).X(0, 0) == doctest::Approx(1.2));  // no clipping
}

TEST_CASE("stratified k-fold") {
    Dataset d;
    d.X.resize(8, 1);
    d.X << 0, 1, 2, 3, 4, 5, 6, 7;
    d.y.resize(8);
    d.y << 1, 1, 1, 1, -1, -1, -1, -1;

    const auto folds = stratified_kfold(d, 4, 99);
    CHECK(folds.size() == 4);
    std::set<Eigen::Index> all;
    for (const auto& f : folds) {
        CHECK(f.test.size() == 2);
        int pos = 0;
        for (auto i : f.test) {
            if (d.y(i) == 1) ++pos;
            CHECK(all.insert(i).second);  // disjoint
        }
        CHECK(pos == 1);  // one sample of each class
        CHECK(f.train.size() == 6);
    }
    CHECK(all.size() == 8);  // covering

    const auto again = stratified_kfold(d, 4, 99);
    for (int f = 0; f < 4; ++f) {
        CHECK(again[f].test == folds[f].test);
        CHECK(again[f].train == folds[f].train);
    }
    CHECK_THROWS_AS(stratified_kfold(d, 5, 0), usage_error);
    CHECK_THROWS_AS(stratified_kfold(d, 1, 0), usage_error);
}

TEST_CASE("noise injection: cell-fraction mode") {
    Dataset d;
    const int l = 40, n = 5;
    d.X.resize(l, n);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0, 1);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < n; ++j) d.X(i, j) = g(rng);
    d.X.col(3).setConstant(2.5);  // zero-variance feature
    d.y = Eigen::VectorXi::Ones(l);

    CHECK_THROWS_AS(NoiseConfig(0.0, 1), usage_error);
    CHECK_THROWS_AS(NoiseConfig(1.5, 1), usage_error);

    // r = 1 touches every cell except those of the zero-variance feature
    const Dataset all = inject_gaussian_noise(d, NoiseConfig(1.0, 5));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == 3)
                CHECK(all.X(i, j) == d.X(i, j));
            else
                CHECK(all.X(i, j) != d.X(i, j));
        }
    CHECK((all.y - d.y).cwiseAbs().maxCoeff() == 0);

    // without a degenerate column the modified-cell count is exact
    Dataset d2 = d;
    for (int i = 0; i < l; ++i) d2.X(i, 3) = g(rng);
    const double r = 0.10;
    const Dataset noisy = inject_gaussian_noise(d2, NoiseConfig(r, 17));
    int changed = 0;
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < n; ++j)
            if (noisy.X(i, j) != d2.X(i, j)) ++changed;
    CHECK(changed == static_cast<int>(std::ceil(r * l * n)));
}

TEST_CASE("noise magnitude follows the folded Gaussian mean") {
    Dataset d;
    const int l = 20000, n = 5;
    d.X.resize(l, n);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0, 1);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < n; ++j) d.X(i, j) = 3.0 * g(rng);
    d.y = Eigen::VectorXi::Ones(l);

    Vector sd(n);
    for (int j = 0; j < n; ++j) {
        const double mean = d.X.col(j).mean();
        sd(j) = std::sqrt((d.X.col(j).array() - mean).square().sum() / (l - 1));
    }

    const Dataset noisy = inject_gaussian_noise(d, NoiseConfig(1.0, 23));
    double sum_abs = 0.0, sum_exp = 0.0;
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < n; ++j) {
            sum_abs += std::abs(noisy.X(i, j) - d.X(i, j));
            sum_exp += sd(j) * std::sqrt(2.0 / M_PI);
        }
    CHECK(sum_abs == doctest::Approx(sum_exp).epsilon(0.05));
}

TEST_CASE("noise injection: amplitude-ratio mode") {
    Dataset d;
    d.X = Matrix::Random(30, 3);
    d.y = Eigen::VectorXi::Ones(30);
    const Dataset noisy =
        inject_gaussian_noise(d, NoiseConfig(0.05, 7, NoiseMode::AmplitudeRatio));
    int changed = 0;
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 3; ++j)
            if (noisy.X(i, j) != d.X(i, j)) ++changed;
    CHECK(changed == 90);  // every cell gets a (small) perturbation
}

TEST_CASE("synthetic generators") {
    const Dataset g = synth_gaussians(100, 10, 2, 42);
    CHECK(g.size() == 200);
    CHECK(g.count_label(1) == 100);
    // separation 10 with unit blobs: the sum-of-coordinates plane separates
    for (Eigen::Index i = 0; i < g.size(); ++i)
        CHECK((g.X.row(i).sum() >= 0 ? 1 : -1) == g.y(i));

    const Dataset x = synth_xor(50, 1);
    CHECK(x.size() == 200);
    // first cluster is (2,2) -> +1, second (2,-2) -> -1
    CHECK(x.y(0) == 1);
    CHECK(x.y(50) == -1);
    CHECK(x.y(100) == -1);
    CHECK(x.y(150) == 1);

    const Dataset g2 = synth_gaussians(100, 10, 2, 42);
    CHECK((g2.X - g.X).cwiseAbs().maxCoeff() == 0.0);
    const Dataset g3 = synth_gaussians(100, 10, 2, 43);
    CHECK((g3.X - g.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("csv write/load round trip") {
    const Dataset d = synth_gaussians(10, 4, 3, 5);
    TempCsv f("");
    write_csv(f.path, d);
    const Dataset back = load_csv(f.path, "label", "1");
    CHECK(back.size() == d.size());
    CHECK(back.dim() == d.dim());
    CHECK((back.X - d.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.y - d.y).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("dataset validation") {
    Dataset d;
    d.X.resize(2, 1);
    d.X << 1, 2;
    d.y.resize(2);
    d.y << 1, 0;
    CHECK_THROWS_AS(d.validate(), data_error);
    d.y << 1, -1;
    CHECK_NOTHROW(d.validate());
    d.X(0, 0) = std::nan("");
    CHECK_THROWS_AS(d.validate(), data_error);
}
