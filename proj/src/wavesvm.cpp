#include "wavecls/wavesvm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace wavecls {

void AdamConfig::validate() const {
    if (!(c > 0.0)) throw usage_error("adam: C must be positive");
    if (!(alpha > 0.0)) throw usage_error("adam: alpha must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw usage_error("adam: beta1 must be in (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw usage_error("adam: beta2 must be in (0,1)");
    if (!(epsilon > 0.0)) throw usage_error("adam: epsilon must be positive");
    if (!(eta > 0.0)) throw usage_error("adam: eta must be positive");
    if (batch_size < 1) throw usage_error("adam: batch size must be >= 1");
    if (max_iter < 1) throw usage_error("adam: max iterations must be >= 1");
}

AdamState AdamState::init(Eigen::Index dim, double value) {
    AdamState s;
    s.params = Vector::Constant(dim, value);
    s.m = Vector::Constant(dim, value);
    s.v = Vector::Constant(dim, value);
    s.t = 1;
    return s;
}

AdamState adam_update(const AdamState& state, const Vector& grad, const AdamConfig& config) {
    if (grad.size() != state.params.size()) throw usage_error("adam: gradient size mismatch");
    AdamState next;
    next.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
    next.v = config.beta2 * state.v + (1.0 - config.beta2) * grad.array().square().matrix();
    const Vector m_hat = next.m / (1.0 - std::pow(config.beta1, state.t));
    const Vector v_hat = next.v / (1.0 - std::pow(config.beta2, state.t));
    next.params = state.params.array() -
                  config.alpha * m_hat.array() / (v_hat.array().sqrt() + config.epsilon);
    next.t = state.t + 1;
    return next;
}

double LinearModel::decision(const Eigen::Ref<const Vector>& x) const {
    if (x.size() + 1 != w.size()) throw usage_error("predict: dimension mismatch");
    return w.head(w.size() - 1).dot(x) + w(w.size() - 1);
}

double KernelModel::decision(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != support.cols()) throw usage_error("predict: dimension mismatch");
    double f = 0.0;
    for (Eigen::Index j = 0; j < support.rows(); ++j)
        f += gamma(j) * kernel_eval(kernel, support.row(j).transpose(), x);
    return f;
}

Vector gradient_linear(const Vector& w, const Dataset& batch, double c, const WaveParams& loss) {
    if (batch.size() == 0) throw usage_error("gradient: empty batch");
    if (w.size() != batch.dim() + 1) throw usage_error("gradient: dimension mismatch");
    Vector g = w;
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
        const double f = w.head(batch.dim()).dot(batch.X.row(i)) + w(batch.dim());
        const double xi = 1.0 - batch.y(i) * f;
        const double d = grad_wave(loss, xi);
        if (d == 0.0) continue;
        g.head(batch.dim()) -= c * batch.y(i) * d * batch.X.row(i).transpose();
        g(batch.dim()) -= c * batch.y(i) * d;
    }
    return g;
}

double objective_linear(const Vector& w, const Dataset& data, double c, const WaveParams& loss) {
    double obj = 0.5 * w.squaredNorm();
    const LossSpec spec = LossSpec::wave(loss);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double f = w.head(data.dim()).dot(data.X.row(i)) + w(data.dim());
        obj += c * eval_loss(spec, 1.0 - data.y(i) * f);
    }
    return obj;
}

Vector gradient_kernel(const Vector& gamma, const Matrix& K, const Eigen::VectorXi& y,
                       double c, const WaveParams& loss) {
    Vector g = K * gamma;
    const Vector f = K * gamma;
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        const double xi = 1.0 - y(i) * f(i);
        const double d = grad_wave(loss, xi);
        if (d == 0.0) continue;
        g -= c * y(i) * d * K.row(i).transpose();
    }
    return g;
}

double objective_kernel(const Vector& gamma, const Matrix& K, const Eigen::VectorXi& y,
                        double c, const WaveParams& loss) {
    double obj = 0.5 * gamma.dot(K * gamma);
    const LossSpec spec = LossSpec::wave(loss);
    const Vector f = K * gamma;
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        obj += c * eval_loss(spec, 1.0 - y(i) * f(i));
    return obj;
}

namespace {

// Uniform sample of `count` distinct indices from [0, l).
std::vector<Eigen::Index> sample_without_replacement(Eigen::Index l, Eigen::Index count,
                                                     std::mt19937_64& rng) {
    std::vector<Eigen::Index> idx(l);
    std::iota(idx.begin(), idx.end(), 0);
    for (Eigen::Index i = 0; i < count; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, l - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    return idx;
}

}  // namespace

LinearModel train_linear(const Dataset& data, const AdamConfig& config) {
    config.validate();
    data.validate();
    const Eigen::Index k = std::min<Eigen::Index>(config.batch_size, data.size());

    std::mt19937_64 rng(config.seed);
    AdamState state = AdamState::init(data.dim() + 1, config.init_value);

    LinearModel model;
    model.seed = config.seed;
    for (int t = 0; t < config.max_iter; ++t) {
        const Dataset batch = data.subset(sample_without_replacement(data.size(), k, rng));
        const Vector grad = gradient_linear(state.params, batch, config.c, config.loss);
        AdamState next = adam_update(state, grad, config);
        const double delta = (next.params - state.params).lpNorm<Eigen::Infinity>();
        state = std::move(next);
        model.iterations_run = t + 1;
        if (delta < config.eta) {
            model.converged = true;
            break;
        }
    }
    model.w = state.params;
    if (!model.w.allFinite()) throw numeric_error("wave-svm: training diverged (non-finite weights)");
    return model;
}

KernelModel train_kernel(const Dataset& data, const AdamConfig& config, const KernelSpec& kernel) {
    config.validate();
    data.validate();
    const Eigen::Index k = std::min<Eigen::Index>(config.batch_size, data.size());

    std::mt19937_64 rng(config.seed);
    // The support set is fixed once; gamma's dimension is tied to it.
    const auto support_idx = sample_without_replacement(data.size(), k, rng);
    const Dataset sup = data.subset(support_idx);
    const Matrix K = gram_matrix(kernel, sup.X, sup.X);

    AdamState state = AdamState::init(k, config.init_value);
    KernelModel model;
    model.support = sup.X;
    model.support_labels = sup.y;
    model.kernel = kernel;
    model.seed = config.seed;
    for (int t = 0; t < config.max_iter; ++t) {
        const Vector grad = gradient_kernel(state.params, K, sup.y, config.c, config.loss);
        AdamState next = adam_update(state, grad, config);
        const double delta = (next.params - state.params).lpNorm<Eigen::Infinity>();
        state = std::move(next);
        model.iterations_run = t + 1;
        if (delta < config.eta) {
            model.converged = true;
            break;
        }
    }
    model.gamma = state.params;
    if (!model.gamma.allFinite()) throw numeric_error("wave-svm: training diverged (non-finite gamma)");
    return model;
}

Eigen::VectorXi predict_linear(const LinearModel& model, const Matrix& X) {
    Eigen::VectorXi out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out(i) = model.decision(X.row(i).transpose()) >= 0.0 ? 1 : -1;
    return out;
}

Eigen::VectorXi predict_kernel(const KernelModel& model, const Matrix& X) {
    Eigen::VectorXi out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out(i) = model.decision(X.row(i).transpose()) >= 0.0 ? 1 : -1;
    return out;
}

}  // namespace wavecls
