#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavecls/dataset.hpp"
#include "wavecls/kernels.hpp"
#include "wavecls/losses.hpp"

namespace wavecls {

/// Percentage of agreeing labels, 100*(TP+TN)/l.
double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);

enum class ModelFamily { WaveSvmLinear, WaveSvmKernel, WaveTsvmLinear, WaveTsvmKernel };

ModelFamily parse_model_family(const std::string& name);
std::string family_name(ModelFamily family);
bool family_is_kernel(ModelFamily family);
bool family_is_twin(ModelFamily family);

/// Ordered hyperparameter value lists swept by the benchmark. Defaults per
/// family: C over {10^i, i=-6..6}; lambda over 0.1..1.9 step 0.2; a over
/// -2..5 step 0.1 (hinge-style solver) or -2..2 step 0.5 with lambda fixed
/// at 1 (twin solver, whose C pairs range over {10^i, i even}); sigma over
/// {10^i} for kernel variants.
struct GridSpec {
    std::vector<double> c_values;
    std::vector<double> c2_values;      // twin penalty pair; empty for the SVM families
    std::vector<double> lambda_values;
    std::vector<double> a_values;
    std::vector<double> sigma_values;   // empty for linear families

    static GridSpec defaults(ModelFamily family);
    void validate(ModelFamily family) const;
};

/// One point of the hyperparameter grid. `c2` mirrors the twin solver's
/// second penalty (ignored by the SVM families); `sigma` is 0 for linear.
struct ParamTuple {
    double c = 1.0;
    double c2 = 1.0;
    double lambda = 1.0;
    double a = 1.0;
    double sigma = 0.0;
};

struct CellResult {
    ParamTuple params;
    std::vector<double> fold_accuracy;
    double score = 0.0;
    bool failed = false;
    std::string error;
};

enum class FoldScore { BestOfK, MeanOfK };

struct GridSearchResult {
    ModelFamily family = ModelFamily::WaveSvmLinear;
    ParamTuple best;
    double best_score = 0.0;
    std::vector<CellResult> cells;
    int folds = 4;
    std::uint64_t seed = 0;
};

/// Cross-validated sweep over every tuple of `grid`. Per fold the scaler is
/// fit on the training split only; each cell draws its training seed from
/// (seed, cell index) so results do not depend on evaluation order or the
/// number of worker threads. Cells whose training throws are recorded as
/// failed instead of aborting the sweep. Ties keep the first tuple in grid
/// order.
GridSearchResult grid_search_cv(const Dataset& data, ModelFamily family, const GridSpec& grid,
                                int k = 4, std::uint64_t seed = 0,
                                FoldScore score = FoldScore::BestOfK, int jobs = 1);

/// Accuracy matrix over D datasets x p models; NaN marks a result a model
/// does not report for a dataset.
struct RankTable {
    std::vector<std::string> datasets;
    std::vector<std::string> models;
    Matrix acc;  // D x p, percentages

    void validate() const;
};

/// CSV with a header row of model names and a leading dataset-name column;
/// empty cells load as NaN.
RankTable load_rank_table(const std::string& path);

/// Per-model mean of per-dataset ranks (best accuracy gets rank 1; ties
/// share the average of their positions). NaN entries are skipped: the row
/// is ranked over the models present and each model's mean is taken over
/// the datasets it appears in.
Vector mean_ranks(const RankTable& table);

struct FriedmanResult {
    double chi2 = 0.0;
    double f_stat = 0.0;
};

/// chi2_F = (12D/(p(p+1))) (sum R^2 - p(p+1)^2/4);
/// F_F = (D-1) chi2_F / (D(p-1) - chi2_F).
FriedmanResult friedman_test(const Vector& ranks, int D, int p);

/// CD = q_alpha * sqrt(p(p+1)/(6D)).
double nemenyi_cd(double q_alpha, int D, int p);

struct WinTieLoss {
    int wins = 0;
    int ties = 0;
    int losses = 0;
    int compared = 0;       // datasets where both models report
    double threshold = 0.0; // D/2 + 1.96*sqrt(D)/2
    bool significant = false;
};

/// Pairwise dataset-count comparison of model_a against model_b. The
/// significance test shares ties equally between the two sides, rounding the
/// odd half toward wins.
WinTieLoss win_tie_loss(const RankTable& table, const std::string& model_a,
                        const std::string& model_b);

}  // namespace wavecls
