#include "wavecls/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace wavecls {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
}

}  // namespace

Eigen::Index Dataset::count_label(int label) const {
    return (y.array() == label).count();
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
        out.y(static_cast<Eigen::Index>(i)) = y(rows[i]);
    }
    out.feature_names = feature_names;
    return out;
}

void Dataset::validate() const {
    if (X.rows() != y.size()) throw data_error("dataset: row/label count mismatch");
    if (X.rows() == 0) throw data_error("dataset: empty");
    if (!X.allFinite()) throw data_error("dataset: non-finite feature value");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 1 && y(i) != -1) throw data_error("dataset: labels must be +-1");
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw data_error(path + ": empty file");

    // Header detection: a first row with any non-numeric cell is a header.
    auto first = split_csv_line(lines.front());
    bool has_header = false;
    for (const auto& f : first) {
        double v;
        if (!parse_number(f, v)) {
            has_header = true;
            break;
        }
    }

    const std::size_t ncols = first.size();
    if (ncols < 2) throw data_error(path + ": need at least one feature and a label column");

    std::size_t label_idx;
    std::vector<std::string> header;
    if (has_header) header = first;
    if (has_header &&
        std::find(header.begin(), header.end(), label_column) != header.end()) {
        label_idx = static_cast<std::size_t>(
            std::find(header.begin(), header.end(), label_column) - header.begin());
    } else {
        char* end = nullptr;
        const long idx = std::strtol(label_column.c_str(), &end, 10);
        if (end != label_column.c_str() + label_column.size() || idx < 0 ||
            static_cast<std::size_t>(idx) >= ncols)
            throw data_error(path + ": label column '" + label_column + "' not found");
        label_idx = static_cast<std::size_t>(idx);
    }

    const std::size_t first_data = has_header ? 1 : 0;
    const std::size_t nrows = lines.size() - first_data;
    if (nrows == 0) throw data_error(path + ": no data rows");

    Dataset d;
    d.X.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols - 1));
    d.y.resize(static_cast<Eigen::Index>(nrows));
    for (std::size_t r = 0; r < nrows; ++r) {
        const auto fields = split_csv_line(lines[first_data + r]);
        if (fields.size() != ncols)
            throw data_error(path + ": row " + std::to_string(first_data + r + 1) +
                             " has " + std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(ncols));
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < ncols; ++j) {
            if (j == label_idx) {
                d.y(static_cast<Eigen::Index>(r)) = fields[j] == positive_label ? 1 : -1;
                continue;
            }
            double v;
            if (!parse_number(fields[j], v))
                throw data_error(path + ": row " + std::to_string(first_data + r + 1) +
                                 ", column " + std::to_string(j + 1) +
                                 ": non-numeric value '" + fields[j] + "'");
            d.X(static_cast<Eigen::Index>(r), c++) = v;
        }
    }
    if (has_header)
        for (std::size_t j = 0; j < ncols; ++j)
            if (j != label_idx) d.feature_names.push_back(header[j]);
    d.validate();
    return d;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& train) {
    if (train.size() == 0) throw data_error("minmax: empty training set");
    MinMaxScaler s;
    s.min = train.X.colwise().minCoeff();
    s.range = train.X.colwise().maxCoeff().transpose() - s.min;
    return s;
}

Dataset MinMaxScaler::apply(const Dataset& d) const {
    if (d.dim() != min.size()) throw usage_error("minmax: dimension mismatch");
    Dataset out = d;
    for (Eigen::Index j = 0; j < min.size(); ++j) {
        if (range(j) == 0.0)
            out.X.col(j).setZero();
        else
            out.X.col(j) = (d.X.col(j).array() - min(j)) / range(j);
    }
    return out;
}

std::vector<FoldSplit> stratified_kfold(const Dataset& data, int k, std::uint64_t seed) {
    if (k < 2) throw usage_error("kfold: k must be >= 2");
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < data.size(); ++i)
        (data.y(i) == 1 ? pos : neg).push_back(i);
    if (static_cast<int>(pos.size()) < k || static_cast<int>(neg.size()) < k)
        throw usage_error("kfold: each class needs at least k samples");

    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    std::vector<std::vector<Eigen::Index>> test_folds(k);
    for (std::size_t i = 0; i < pos.size(); ++i) test_folds[i % k].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) test_folds[i % k].push_back(neg[i]);

    std::vector<FoldSplit> splits(k);
    for (int f = 0; f < k; ++f) {
        std::sort(test_folds[f].begin(), test_folds[f].end());
        splits[f].test = test_folds[f];
        for (int g = 0; g < k; ++g)
            if (g != f)
                splits[f].train.insert(splits[f].train.end(), test_folds[g].begin(),
                                       test_folds[g].end());
        std::sort(splits[f].train.begin(), splits[f].train.end());
    }
    return splits;
}

NoiseConfig::NoiseConfig(double level_, std::uint64_t seed_, NoiseMode mode_)
    : level(level_), seed(seed_), mode(mode_) {
    if (!(level > 0.0 && level <= 1.0)) throw usage_error("noise: level must be in (0,1]");
}

Dataset inject_gaussian_noise(const Dataset& data, const NoiseConfig& cfg) {
    const Eigen::Index l = data.size(), n = data.dim();
    Dataset out = data;

    // Per-feature sample standard deviation.
    Vector sd(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mean = data.X.col(j).mean();
        const double ss = (data.X.col(j).array() - mean).square().sum();
        sd(j) = l > 1 ? std::sqrt(ss / static_cast<double>(l - 1)) : 0.0;
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (cfg.mode == NoiseMode::AmplitudeRatio) {
        for (Eigen::Index i = 0; i < l; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                out.X(i, j) += cfg.level * sd(j) * gauss(rng);
        return out;
    }

    const auto total = static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(n);
    auto count = static_cast<std::uint64_t>(
        std::ceil(cfg.level * static_cast<double>(total)));
    count = std::min(count, total);

    std::vector<std::uint64_t> cells(total);
    std::iota(cells.begin(), cells.end(), 0);
    std::shuffle(cells.begin(), cells.end(), rng);
    for (std::uint64_t c = 0; c < count; ++c) {
        const Eigen::Index i = static_cast<Eigen::Index>(cells[c] / n);
        const Eigen::Index j = static_cast<Eigen::Index>(cells[c] % n);
        out.X(i, j) += sd(j) * gauss(rng);  // sd 0 leaves the cell unchanged
    }
    return out;
}

Dataset synth_gaussians(int n_per_class, double separation, int dim, std::uint64_t seed) {
    if (n_per_class <= 0 || dim <= 0) throw usage_error("synth: counts must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset d;
    d.X.resize(2 * n_per_class, dim);
    d.y.resize(2 * n_per_class);
    const double c = separation / 2.0;
    for (int i = 0; i < 2 * n_per_class; ++i) {
        const int label = i < n_per_class ? 1 : -1;
        for (int j = 0; j < dim; ++j) d.X(i, j) = label * c + gauss(rng);
        d.y(i) = label;
    }
    return d;
}

Dataset synth_xor(int n_per_cluster, std::uint64_t seed) {
    if (n_per_cluster <= 0) throw usage_error("synth: counts must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset d;
    d.X.resize(4 * n_per_cluster, 2);
    d.y.resize(4 * n_per_cluster);
    const double centers[4][2] = {{2, 2}, {2, -2}, {-2, 2}, {-2, -2}};
    Eigen::Index r = 0;
    for (const auto& c : centers) {
        for (int i = 0; i < n_per_cluster; ++i, ++r) {
            d.X(r, 0) = c[0] + gauss(rng);
            d.X(r, 1) = c[1] + gauss(rng);
            d.y(r) = c[0] * c[1] > 0 ? 1 : -1;
        }
    }
    return d;
}

void write_csv(const std::string& path, const Dataset& d, const std::string& label_name) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out.precision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
        if (j < static_cast<Eigen::Index>(d.feature_names.size()))
            out << d.feature_names[j];
        else
            out << "f" << j;
        out << ',';
    }
    out << label_name << '\n';
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        for (Eigen::Index j = 0; j < d.dim(); ++j) out << d.X(i, j) << ',';
        out << d.y(i) << '\n';
    }
}

}  // namespace wavecls
