#include "wavecls/kernels.hpp"

#include <cmath>

namespace wavecls {

KernelSpec KernelSpec::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw usage_error("gaussian kernel: sigma must be positive");
    return {KernelKind::Gaussian, sigma};
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size()) throw usage_error("kernel: dimension mismatch");
    if (spec.kind == KernelKind::Linear) return x.dot(y);
    return std::exp(-(x - y).squaredNorm() / (spec.sigma * spec.sigma));
}

Matrix gram_matrix(const KernelSpec& spec, const Eigen::Ref<const Matrix>& X,
                   const Eigen::Ref<const Matrix>& Y) {
    if (X.cols() != Y.cols()) throw usage_error("gram: feature dimension mismatch");
    if (spec.kind == KernelKind::Linear) return X * Y.transpose();
    Matrix K(X.rows(), Y.rows());
    const double inv_s2 = 1.0 / (spec.sigma * spec.sigma);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < Y.rows(); ++j)
            K(i, j) = std::exp(-(X.row(i) - Y.row(j)).squaredNorm() * inv_s2);
    return K;
}

}  // namespace wavecls
