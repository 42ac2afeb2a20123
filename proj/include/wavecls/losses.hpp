#pragma once

#include <ostream>
#include <vector>

#include "wavecls/common.hpp"

namespace wavecls {

/// Parameters of the wave loss: shape `a` (any finite real) and bounding
/// parameter `lambda` (> 0, caps the loss at 1/lambda).
struct WaveParams {
    double a = 1.0;
    double lambda = 1.0;

    WaveParams() = default;
    WaveParams(double a_, double lambda_);
};

enum class LossKind {
    Hinge,
    Pinball,
    Ramp,
    SquaredHinge,
    SmoothPinball,
    Linex,
    Roboss,
    Wave,
    ZeroOneLambda,
};

/// Tagged loss family. Build instances through the factory functions below,
/// which validate the per-family parameter ranges.
struct LossSpec {
    LossKind kind = LossKind::Hinge;
    double a = 0.0;       // Linex, Roboss, Wave
    double lambda = 0.0;  // Roboss, Wave, ZeroOneLambda
    double tau = 0.0;     // Pinball, SmoothPinball
    double theta = 0.0;   // Ramp

    static LossSpec hinge();
    static LossSpec pinball(double tau);
    static LossSpec ramp(double theta);
    static LossSpec squared_hinge();
    static LossSpec smooth_pinball(double tau);
    static LossSpec linex(double a);
    static LossSpec roboss(double a, double lambda);
    static LossSpec wave(double a, double lambda);
    static LossSpec wave(const WaveParams& p) { return wave(p.a, p.lambda); }
    static LossSpec zero_one_lambda(double lambda);

    const char* name() const;
};

/// Loss value at margin residual u = 1 - y*f(x). Throws usage_error on
/// non-finite u. Saturates instead of overflowing: the wave loss returns its
/// analytic limit 1/lambda when lambda*u^2*e^{a*u} exceeds the double range.
double eval_loss(const LossSpec& spec, double u);

/// Derivative of the wave loss: u*(a*u+2)*e^{a*u} / (1 + lambda*u^2*e^{a*u})^2.
/// Saturates to 0 in the overflow regime, never NaN.
double grad_wave(const WaveParams& params, double u);

/// Expected conditional loss  L(1-f)*p + L(1+f)*(1-p)  for p = P(y=1|x).
double conditional_risk(const LossSpec& spec, double f, double p);

/// Grid of candidate scores for the conditional-risk minimizer. The grid must
/// be strictly increasing and contain both signs.
struct CalibrationQuery {
    double p = 0.5;
    std::vector<double> f_grid;

    CalibrationQuery(double p_, std::vector<double> grid);
    /// Uniform grid lo:step:hi (inclusive of hi up to rounding).
    static CalibrationQuery uniform(double p, double lo, double hi, double step);
};

/// Grid point minimizing conditional_risk. Ties are broken toward the value
/// of smallest absolute magnitude, then toward the negative candidate.
double calibration_argmin(const LossSpec& spec, const CalibrationQuery& query);

/// Emit CSV rows "u,loss[,grad]" over [lo, hi] with `samples` points.
/// The grad column is only written for the wave loss.
void write_loss_curve(std::ostream& out, const LossSpec& spec, double lo, double hi,
                      int samples);

}  // namespace wavecls
