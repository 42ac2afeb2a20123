#pragma once

#include <optional>
#include <string>

#include "wavecls/eval.hpp"
#include "wavecls/wavesvm.hpp"
#include "wavecls/wavetsvm.hpp"

namespace wavecls {

/// A trained model of any family plus the feature scaler fitted alongside
/// it, so saved models apply to raw feature rows.
struct SavedModel {
    ModelFamily family = ModelFamily::WaveSvmLinear;
    std::optional<LinearModel> linear;
    std::optional<KernelModel> kernel;
    std::optional<TwinModel> twin;
    std::optional<MinMaxScaler> scaler;

    /// Scales X if a scaler is present, then dispatches to the family's
    /// predictor.
    Eigen::VectorXi predict(const Matrix& X) const;
};

/// JSON round-trip; finite doubles survive bit-exactly.
void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

}  // namespace wavecls
