#pragma once

#include <vector>

#include "wavecls/dataset.hpp"
#include "wavecls/kernels.hpp"
#include "wavecls/losses.hpp"

namespace wavecls {

/// Adam hyperparameters plus the wave-loss trade-off C. Defaults follow the
/// evaluation protocol: beta1=0.9, beta2=0.999, eta=1e-5, epsilon=1e-8,
/// batch k=32, T=1000, and all state vectors initialized at 0.01.
struct AdamConfig {
    double c = 1.0;
    WaveParams loss{1.0, 1.0};
    double alpha = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double eta = 1e-5;
    int batch_size = 32;
    int max_iter = 1000;
    std::uint64_t seed = 0;
    double init_value = 0.01;  // initial weights and moment entries

    void validate() const;
};

/// Adam accumulator: parameters plus first/second moment vectors and the
/// 1-based iteration counter.
struct AdamState {
    Vector params;
    Vector m;
    Vector v;
    int t = 1;

    static AdamState init(Eigen::Index dim, double value);
};

/// One bias-corrected Adam step:
///   m' = b1*m + (1-b1)*g,  v' = b2*v + (1-b2)*g.^2,
///   params' = params - alpha * (m'/(1-b1^t)) ./ (sqrt(v'/(1-b2^t)) + eps).
AdamState adam_update(const AdamState& state, const Vector& grad, const AdamConfig& config);

/// Linear model in augmented form: w holds [weights; bias].
struct LinearModel {
    Vector w;
    int iterations_run = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    double decision(const Eigen::Ref<const Vector>& x) const;
};

/// Kernel model over a fixed support subset: decision is
/// sum_j gamma_j * K(support_j, x).
struct KernelModel {
    Matrix support;       // k x n rows selected at training start
    Eigen::VectorXi support_labels;
    Vector gamma;
    KernelSpec kernel;
    int iterations_run = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    double decision(const Eigen::Ref<const Vector>& x) const;
};

/// Mini-batch gradient of the regularized wave objective at w:
///   w - sum_{i in batch} C * y_i * x_i * grad_wave(1 - y_i * w.x_i)
/// with samples in augmented form [x; 1].
Vector gradient_linear(const Vector& w, const Dataset& batch, double c, const WaveParams& loss);

/// Full objective 0.5*||w||^2 + C * sum_i wave(1 - y_i * w.x_i) over `data`;
/// used by the descent diagnostics and the finite-difference checks.
double objective_linear(const Vector& w, const Dataset& data, double c, const WaveParams& loss);

/// Kernel-space gradient K*gamma - sum_i C*y_i*K_i*grad_wave(xi_i) with
/// xi_i = 1 - y_i*(K*gamma)_i over the support set.
Vector gradient_kernel(const Vector& gamma, const Matrix& K, const Eigen::VectorXi& y,
                       double c, const WaveParams& loss);

double objective_kernel(const Vector& gamma, const Matrix& K, const Eigen::VectorXi& y,
                        double c, const WaveParams& loss);

/// Adam training with a fresh uniform mini-batch (without replacement) each
/// iteration; stops when the max-norm parameter change drops below eta.
LinearModel train_linear(const Dataset& data, const AdamConfig& config);

/// Kernel training: min(k, l) support samples drawn once, then Adam on the
/// coefficient vector gamma against the support Gram matrix.
KernelModel train_kernel(const Dataset& data, const AdamConfig& config, const KernelSpec& kernel);

/// sign(w.[x;1]) with sign(0) mapped to +1.
Eigen::VectorXi predict_linear(const LinearModel& model, const Matrix& X);

Eigen::VectorXi predict_kernel(const KernelModel& model, const Matrix& X);

}  // namespace wavecls
