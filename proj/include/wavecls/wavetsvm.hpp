#pragma once

#include <Eigen/Cholesky>
#include <optional>

#include "wavecls/dataset.hpp"
#include "wavecls/kernels.hpp"
#include "wavecls/losses.hpp"

namespace wavecls {

/// Twin-solver configuration. The evaluation protocol ties C1=C3 and C2=C4;
/// defaults follow it (eta=1e-5, T=50).
struct TwinConfig {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double c4 = 1.0;
    WaveParams loss{1.0, 1.0};
    double eta = 1e-5;
    int max_iter = 50;
    std::optional<KernelSpec> kernel;

    void validate() const;
};

/// Entrywise derivative core shared with grad_wave:
///   m*(a*m+2)*e^{a*m} / (1 + lambda*m^2*e^{a*m})^2,
/// saturating to 0 in the overflow regime.
Vector s_vector(const Vector& margins, const WaveParams& loss);

/// Applies Q = (MM^T + cI)^{-1} to rhs through the Sherman-Morrison-Woodbury
/// form Q = (1/c)(I - M (cI + M^T M)^{-1} M^T), so the inner solve has the
/// size of M's column count. Throws numeric_error with a condition report if
/// the inner factorization fails.
Vector smw_inverse_apply(const Matrix& M, double c, const Vector& rhs);

/// Reusable SMW operator: factors (cI + M^T M) once.
class SmwOperator {
  public:
    SmwOperator(Matrix M, double c);
    Vector apply(const Vector& rhs) const;

  private:
    Matrix m_;
    double c_;
    Eigen::LLT<Matrix> inner_;
};

/// Trained twin model. Linear: two augmented planes [w; b]. Kernel: two
/// coefficient vectors of length l+1 plus the training matrix needed to
/// evaluate the hypersurfaces.
struct TwinModel {
    Vector positive_plane;  // linear w1 = [w+; b+], kernel v1 = [v+; b+]
    Vector negative_plane;
    int iterations_pos = 0;
    int iterations_neg = 0;
    bool converged_pos = false;
    bool converged_neg = false;
    std::optional<KernelSpec> kernel;
    Matrix train_X;  // kernel case only

    bool is_kernel() const { return kernel.has_value(); }
};

/// Fixed-point iteration on the two planes, each from w=0, with the SPD
/// system (GG^T + C I) factored once per plane.
TwinModel train_twin_linear(const Dataset& data, const TwinConfig& config);

/// Kernel variant: iterates v1 <- -Q1*(C2*N*s1), v2 <- Q2*(C4*M*s2) with the
/// Q actions computed through the SMW form.
TwinModel train_twin_kernel(const Dataset& data, const TwinConfig& config);

TwinModel train_twin(const Dataset& data, const TwinConfig& config);

/// Nearer normalized plane wins; exact ties go to +1.
Eigen::VectorXi predict_twin(const TwinModel& model, const Matrix& X);

}  // namespace wavecls
