#include "wavecls/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "wavecls/wavesvm.hpp"
#include "wavecls/wavetsvm.hpp"

namespace wavecls {

double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
    if (pred.size() != truth.size()) throw usage_error("accuracy: length mismatch");
    if (pred.size() == 0) throw usage_error("accuracy: empty prediction");
    const auto hits = (pred.array() == truth.array()).count();
    return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

ModelFamily parse_model_family(const std::string& name) {
    if (name == "wave-svm-linear") return ModelFamily::WaveSvmLinear;
    if (name == "wave-svm-kernel") return ModelFamily::WaveSvmKernel;
    if (name == "wave-tsvm-linear") return ModelFamily::WaveTsvmLinear;
    if (name == "wave-tsvm-kernel") return ModelFamily::WaveTsvmKernel;
    throw usage_error("unknown model family '" + name + "'");
}

std::string family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::WaveSvmLinear: return "wave-svm-linear";
        case ModelFamily::WaveSvmKernel: return "wave-svm-kernel";
        case ModelFamily::WaveTsvmLinear: return "wave-tsvm-linear";
        case ModelFamily::WaveTsvmKernel: return "wave-tsvm-kernel";
    }
    throw usage_error("unknown model family");
}

bool family_is_kernel(ModelFamily family) {
    return family == ModelFamily::WaveSvmKernel || family == ModelFamily::WaveTsvmKernel;
}

bool family_is_twin(ModelFamily family) {
    return family == ModelFamily::WaveTsvmLinear || family == ModelFamily::WaveTsvmKernel;
}

namespace {

std::vector<double> powers_of_ten(int lo, int hi, int step) {
    std::vector<double> v;
    for (int i = lo; i <= hi; i += step) v.push_back(std::pow(10.0, i));
    return v;
}

std::vector<double> arange(double lo, double hi, double step) {
    std::vector<double> v;
    // index-based stepping avoids accumulating the increment error
    const int count = static_cast<int>(std::round((hi - lo) / step)) + 1;
    for (int i = 0; i < count; ++i) v.push_back(lo + i * step);
    return v;
}

}  // namespace

GridSpec GridSpec::defaults(ModelFamily family) {
    GridSpec g;
    if (family_is_twin(family)) {
        g.c_values = powers_of_ten(-6, 6, 2);
        g.c2_values = g.c_values;
        g.lambda_values = {1.0};
        g.a_values = arange(-2.0, 2.0, 0.5);
    } else {
        g.c_values = powers_of_ten(-6, 6, 1);
        g.lambda_values = arange(0.1, 1.9, 0.2);
        g.a_values = arange(-2.0, 5.0, 0.1);
    }
    if (family_is_kernel(family)) g.sigma_values = powers_of_ten(-6, 6, 1);
    return g;
}

void GridSpec::validate(ModelFamily family) const {
    if (c_values.empty() || lambda_values.empty() || a_values.empty())
        throw usage_error("grid: C, lambda and a lists must be nonempty");
    if (family_is_twin(family) && c2_values.empty())
        throw usage_error("grid: twin families need a second C list");
    if (family_is_kernel(family) && sigma_values.empty())
        throw usage_error("grid: kernel families need a sigma list");
    for (double v : lambda_values)
        if (!(v > 0.0)) throw usage_error("grid: lambda values must be positive");
    for (double v : c_values)
        if (!(v > 0.0)) throw usage_error("grid: C values must be positive");
    for (double v : sigma_values)
        if (!(v > 0.0)) throw usage_error("grid: sigma values must be positive");
}

namespace {

std::vector<ParamTuple> enumerate_grid(const GridSpec& grid, ModelFamily family) {
    const std::vector<double> ones{1.0};
    const auto& c2s = family_is_twin(family) ? grid.c2_values : ones;
    const auto& sigmas = family_is_kernel(family) ? grid.sigma_values : std::vector<double>{0.0};
    std::vector<ParamTuple> tuples;
    for (double c : grid.c_values)
        for (double c2 : c2s)
            for (double lambda : grid.lambda_values)
                for (double a : grid.a_values)
                    for (double sigma : sigmas)
                        tuples.push_back({c, c2, lambda, a, sigma});
    return tuples;
}

Eigen::VectorXi train_and_predict(ModelFamily family, const ParamTuple& p, const Dataset& train,
                                  const Matrix& test_X, std::uint64_t seed) {
    const WaveParams loss{p.a, p.lambda};
    if (family_is_twin(family)) {
        TwinConfig cfg;
        cfg.c1 = cfg.c3 = p.c;
        cfg.c2 = cfg.c4 = p.c2;
        cfg.loss = loss;
        if (family_is_kernel(family)) cfg.kernel = KernelSpec::gaussian(p.sigma);
        return predict_twin(train_twin(train, cfg), test_X);
    }
    AdamConfig cfg;
    cfg.c = p.c;
    cfg.loss = loss;
    cfg.seed = seed;
    if (family_is_kernel(family))
        return predict_kernel(train_kernel(train, cfg, KernelSpec::gaussian(p.sigma)), test_X);
    return predict_linear(train_linear(train, cfg), test_X);
}

}  // namespace

GridSearchResult grid_search_cv(const Dataset& data, ModelFamily family, const GridSpec& grid,
                                int k, std::uint64_t seed, FoldScore score, int jobs) {
    grid.validate(family);
    data.validate();
    if (jobs < 1) throw usage_error("grid: jobs must be >= 1");

    const auto folds = stratified_kfold(data, k, seed);
    const auto tuples = enumerate_grid(grid, family);

    GridSearchResult result;
    result.family = family;
    result.folds = k;
    result.seed = seed;
    result.cells.resize(tuples.size());

    auto run_cell = [&](std::size_t idx) {
        CellResult& cell = result.cells[idx];
        cell.params = tuples[idx];
        const std::uint64_t cell_seed = mix_seed(seed, idx);
        try {
            for (std::size_t f = 0; f < folds.size(); ++f) {
                const Dataset train_raw = data.subset(folds[f].train);
                const Dataset test_raw = data.subset(folds[f].test);
                const MinMaxScaler scaler = MinMaxScaler::fit(train_raw);
                const Dataset train = scaler.apply(train_raw);
                const Dataset test = scaler.apply(test_raw);
                const auto pred = train_and_predict(family, tuples[idx], train, test.X,
                                                    mix_seed(cell_seed, f));
                cell.fold_accuracy.push_back(accuracy(pred, test.y));
            }
            cell.score = score == FoldScore::BestOfK
                             ? *std::max_element(cell.fold_accuracy.begin(),
                                                 cell.fold_accuracy.end())
                             : std::accumulate(cell.fold_accuracy.begin(),
                                               cell.fold_accuracy.end(), 0.0) /
                                   static_cast<double>(cell.fold_accuracy.size());
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
            cell.fold_accuracy.clear();
            cell.score = -1.0;
        }
    };

    if (jobs == 1) {
        for (std::size_t i = 0; i < tuples.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const int n = std::min<std::size_t>(jobs, tuples.size());
        for (int w = 0; w < n; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tuples.size();
                     i = next.fetch_add(1))
                    run_cell(i);
            });
        for (auto& t : workers) t.join();
    }

    std::size_t best = tuples.size();
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        if (result.cells[i].failed) continue;
        if (best == tuples.size() || result.cells[i].score > result.cells[best].score) best = i;
    }
    if (best == tuples.size()) throw numeric_error("grid: every cell failed");
    result.best = result.cells[best].params;
    result.best_score = result.cells[best].score;
    return result;
}

void RankTable::validate() const {
    if (datasets.size() < 2 || models.size() < 2)
        throw data_error("rank table: need at least 2 datasets and 2 models");
    if (acc.rows() != static_cast<Eigen::Index>(datasets.size()) ||
        acc.cols() != static_cast<Eigen::Index>(models.size()))
        throw data_error("rank table: matrix shape mismatch");
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
        for (Eigen::Index j = 0; j < acc.cols(); ++j) {
            const double v = acc(i, j);
            if (std::isnan(v)) continue;
            if (!(v >= 0.0 && v <= 100.0))
                throw data_error("rank table: accuracy out of [0,100] at row " +
                                 std::to_string(i + 1));
        }
}

RankTable load_rank_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    RankTable t;
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t ncols = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (first) {
            if (fields.size() < 3)
                throw data_error(path + ": header needs a name column and >= 2 models");
            t.models.assign(fields.begin() + 1, fields.end());
            ncols = fields.size();
            first = false;
            continue;
        }
        if (fields.size() != ncols)
            throw data_error(path + ": row '" + fields.front() + "' has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(ncols));
        t.datasets.push_back(fields.front());
        std::vector<double> row;
        for (std::size_t j = 1; j < fields.size(); ++j) {
            if (fields[j].empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            char* end = nullptr;
            const double v = std::strtod(fields[j].c_str(), &end);
            if (end != fields[j].c_str() + fields[j].size())
                throw data_error(path + ": non-numeric accuracy '" + fields[j] + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error(path + ": no data rows");
    t.acc.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(t.models.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.acc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    t.validate();
    return t;
}

Vector mean_ranks(const RankTable& table) {
    table.validate();
    const Eigen::Index D = table.acc.rows(), p = table.acc.cols();
    Vector sum = Vector::Zero(p);
    Eigen::VectorXi count = Eigen::VectorXi::Zero(p);
    for (Eigen::Index i = 0; i < D; ++i) {
        std::vector<Eigen::Index> present;
        for (Eigen::Index j = 0; j < p; ++j)
            if (!std::isnan(table.acc(i, j))) present.push_back(j);
        if (present.size() < 2) continue;
        // sort by accuracy descending; equal values share the average position
        std::sort(present.begin(), present.end(), [&](Eigen::Index a, Eigen::Index b) {
            return table.acc(i, a) > table.acc(i, b);
        });
        std::size_t k = 0;
        while (k < present.size()) {
            std::size_t k2 = k;
            while (k2 + 1 < present.size() &&
                   table.acc(i, present[k2 + 1]) == table.acc(i, present[k]))
                ++k2;
            const double rank = (static_cast<double>(k + 1) + static_cast<double>(k2 + 1)) / 2.0;
            for (std::size_t q = k; q <= k2; ++q) {
                sum(present[q]) += rank;
                count(present[q]) += 1;
            }
            k = k2 + 1;
        }
    }
    Vector means(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (count(j) == 0) throw data_error("rank table: model '" + table.models[j] +
                                            "' has no comparable results");
        means(j) = sum(j) / count(j);
    }
    return means;
}

FriedmanResult friedman_test(const Vector& ranks, int D, int p) {
    if (p < 2 || D < 2) throw usage_error("friedman: need D >= 2 and p >= 2");
    if (ranks.size() != p) throw usage_error("friedman: rank vector size mismatch");
    FriedmanResult r;
    const double pp1 = static_cast<double>(p) * (p + 1);
    r.chi2 = 12.0 * D / pp1 * (ranks.squaredNorm() - pp1 * (p + 1) / 4.0);
    const double denom = static_cast<double>(D) * (p - 1) - r.chi2;
    if (denom <= 0.0)
        throw numeric_error("friedman: degenerate statistic (D(p-1) - chi2 <= 0)");
    r.f_stat = (D - 1) * r.chi2 / denom;
    return r;
}

double nemenyi_cd(double q_alpha, int D, int p) {
    if (!(q_alpha > 0.0) || D < 1 || p < 2) throw usage_error("nemenyi: invalid inputs");
    return q_alpha * std::sqrt(static_cast<double>(p) * (p + 1) / (6.0 * D));
}

WinTieLoss win_tie_loss(const RankTable& table, const std::string& model_a,
                        const std::string& model_b) {
    table.validate();
    const auto find = [&](const std::string& name) {
        const auto it = std::find(table.models.begin(), table.models.end(), name);
        if (it == table.models.end())
            throw usage_error("win-tie-loss: model '" + name + "' not in table");
        return static_cast<Eigen::Index>(it - table.models.begin());
    };
    const Eigen::Index a = find(model_a), b = find(model_b);
    WinTieLoss r;
    for (Eigen::Index i = 0; i < table.acc.rows(); ++i) {
        const double va = table.acc(i, a), vb = table.acc(i, b);
        if (std::isnan(va) || std::isnan(vb)) continue;
        ++r.compared;
        if (va > vb)
            ++r.wins;
        else if (va < vb)
            ++r.losses;
        else
            ++r.ties;
    }
    const double D = r.compared;
    r.threshold = D / 2.0 + 1.96 * std::sqrt(D) / 2.0;
    const int effective_wins = r.wins + (r.ties + 1) / 2;  // odd tie goes to the win side
    r.significant = effective_wins >= r.threshold;
    return r;
}

}  // namespace wavecls
