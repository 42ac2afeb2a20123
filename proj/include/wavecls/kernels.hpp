#pragma once

#include "wavecls/common.hpp"

namespace wavecls {

enum class KernelKind { Linear, Gaussian };

/// Kernel selector. The Gaussian form is exp(-||x-y||^2 / sigma^2); the
/// denominator is sigma^2, not 2*sigma^2, so sigma grids stay comparable
/// across models.
struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    double sigma = 1.0;

    static KernelSpec linear() { return {KernelKind::Linear, 0.0}; }
    static KernelSpec gaussian(double sigma);

    const char* name() const { return kind == KernelKind::Linear ? "linear" : "gaussian"; }
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

/// Pairwise kernel matrix: entry (i,j) = k(X.row(i), Y.row(j)).
Matrix gram_matrix(const KernelSpec& spec, const Eigen::Ref<const Matrix>& X,
                   const Eigen::Ref<const Matrix>& Y);

}  // namespace wavecls
