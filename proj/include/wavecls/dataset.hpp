#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavecls/common.hpp"

namespace wavecls {

/// A binary classification sample set: l x n feature matrix plus labels
/// strictly in {-1, +1}.
struct Dataset {
    Matrix X;
    Eigen::VectorXi y;
    std::vector<std::string> feature_names;

    Eigen::Index size() const { return X.rows(); }
    Eigen::Index dim() const { return X.cols(); }
    Eigen::Index count_label(int label) const;
    Dataset subset(const std::vector<Eigen::Index>& rows) const;
    void validate() const;
};

/// Load a CSV file. The label column may be given by header name or 0-based
/// index; rows whose label equals `positive_label` map to +1, everything else
/// to -1. Non-numeric or missing feature cells are rejected with the row
/// number in the message.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label);

/// Per-feature affine map fitted on a training set: (x - min) / (max - min).
/// Constant features map to 0. Applying the scaler to other data may produce
/// values outside [0,1]; no clipping is done.
struct MinMaxScaler {
    Vector min;
    Vector range;  // max - min; 0 for constant features

    static MinMaxScaler fit(const Dataset& train);
    Dataset apply(const Dataset& d) const;
};

struct FoldSplit {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
};

/// Seeded stratified k-fold: class proportions preserved within +-1 sample
/// per fold; the k test folds partition the index set.
std::vector<FoldSplit> stratified_kfold(const Dataset& data, int k, std::uint64_t seed);

enum class NoiseMode {
    CellFraction,    // corrupt ceil(r*l*n) cells, noise sd = feature sd
    AmplitudeRatio,  // corrupt every cell, noise sd = r * feature sd
};

struct NoiseConfig {
    double level = 0.05;
    std::uint64_t seed = 0;
    NoiseMode mode = NoiseMode::CellFraction;

    NoiseConfig() = default;
    NoiseConfig(double level_, std::uint64_t seed_, NoiseMode mode_ = NoiseMode::CellFraction);
};

/// Add zero-mean Gaussian noise to feature cells; labels untouched. In
/// CellFraction mode, exactly ceil(r*l*n) cells are drawn uniformly without
/// replacement and perturbed with that feature's sample standard deviation
/// (cells of zero-variance features are left unchanged).
Dataset inject_gaussian_noise(const Dataset& data, const NoiseConfig& cfg);

/// Two isotropic Gaussian blobs (unit variance) centered at +-separation/2
/// per coordinate; linearly separable by construction for large separations.
Dataset synth_gaussians(int n_per_class, double separation, int dim, std::uint64_t seed);

/// Four unit-variance clusters at (+-2, +-2); label = sign of the coordinate
/// product, so the classes are XOR-patterned and not linearly separable.
Dataset synth_xor(int n_per_cluster, std::uint64_t seed);

/// Write the dataset as CSV with a header row and a trailing label column.
void write_csv(const std::string& path, const Dataset& d, const std::string& label_name = "label");

}  // namespace wavecls
