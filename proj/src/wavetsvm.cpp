#include "wavecls/wavetsvm.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace wavecls {

void TwinConfig::validate() const {
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0))
        throw usage_error("twin: C1..C4 must be positive");
    if (!(eta > 0.0)) throw usage_error("twin: eta must be positive");
    if (max_iter < 1) throw usage_error("twin: max iterations must be >= 1");
}

Vector s_vector(const Vector& margins, const WaveParams& loss) {
    Vector s(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) s(i) = grad_wave(loss, margins(i));
    return s;
}

Vector smw_inverse_apply(const Matrix& M, double c, const Vector& rhs) {
    return SmwOperator(M, c).apply(rhs);
}

SmwOperator::SmwOperator(Matrix M, double c) : m_(std::move(M)), c_(c) {
    if (!(c > 0.0)) throw usage_error("smw: c must be positive");
    Matrix inner = m_.transpose() * m_;
    inner.diagonal().array() += c_;
    inner_.compute(inner);
    if (inner_.info() != Eigen::Success)
        throw numeric_error("smw: inner system cI + M^T M is not numerically SPD (c=" +
                            std::to_string(c_) + ", size " + std::to_string(inner.rows()) + ")");
}

Vector SmwOperator::apply(const Vector& rhs) const {
    if (rhs.size() != m_.rows()) throw usage_error("smw: rhs size mismatch");
    return (rhs - m_ * inner_.solve(m_.transpose() * rhs)) / c_;
}

namespace {

struct ClassSplit {
    Matrix pos;  // rows of the +1 class
    Matrix neg;
};

ClassSplit split_classes(const Dataset& data) {
    const Eigen::Index lp = data.count_label(1);
    const Eigen::Index ln = data.size() - lp;
    if (lp == 0 || ln == 0) throw data_error("twin: both classes must be present");
    ClassSplit s;
    s.pos.resize(lp, data.dim());
    s.neg.resize(ln, data.dim());
    Eigen::Index ip = 0, in = 0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        if (data.y(i) == 1)
            s.pos.row(ip++) = data.X.row(i);
        else
            s.neg.row(in++) = data.X.row(i);
    }
    return s;
}

// Columns [rows_i; 1], as a (d+1) x count matrix.
Matrix augment_columns(const Matrix& rows) {
    Matrix out(rows.cols() + 1, rows.rows());
    out.topRows(rows.cols()) = rows.transpose();
    out.row(rows.cols()).setOnes();
    return out;
}

struct PlaneResult {
    Vector w;
    int iterations = 0;
    bool converged = false;
};

// Shared fixed-point loop: w <- sign * solve(Own Own^T + c_reg I, c_pen * Opp * s(margins))
// with margins(w) = 1 + sign * Opp^T w.  For the positive plane sign = -1 and
// margins are 1 + Opp^T w; for the negative plane sign = +1 and margins are
// 1 - Opp^T w.  `solve` abstracts the dense factorization vs. SMW action.
template <typename Solve>
PlaneResult iterate_plane(const Solve& solve, const Matrix& opp, double c_pen, double sign,
                          const WaveParams& loss, double eta, int max_iter) {
    PlaneResult r;
    r.w = Vector::Zero(opp.rows());
    for (int t = 0; t < max_iter; ++t) {
        const Vector margins = Vector::Ones(opp.cols()) - sign * (opp.transpose() * r.w);
        const Vector w_next = sign * solve(c_pen * (opp * s_vector(margins, loss)));
        const double delta = (w_next - r.w).lpNorm<Eigen::Infinity>();
        r.w = w_next;
        r.iterations = t + 1;
        if (delta < eta) {
            r.converged = true;
            break;
        }
    }
    if (!r.w.allFinite()) throw numeric_error("twin: iteration diverged (non-finite plane)");
    return r;
}

}  // namespace

TwinModel train_twin_linear(const Dataset& data, const TwinConfig& config) {
    config.validate();
    data.validate();
    const ClassSplit cls = split_classes(data);
    const Matrix G = augment_columns(cls.pos);  // (n+1) x l+
    const Matrix H = augment_columns(cls.neg);

    Matrix A1 = G * G.transpose();
    A1.diagonal().array() += config.c1;
    Eigen::LLT<Matrix> llt1(A1);
    Matrix A2 = H * H.transpose();
    A2.diagonal().array() += config.c3;
    Eigen::LLT<Matrix> llt2(A2);
    if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success)
        throw numeric_error("twin: plane system not numerically SPD");

    TwinModel model;
    const auto p1 = iterate_plane([&](const Vector& r) { return llt1.solve(r); }, H, config.c2,
                                  -1.0, config.loss, config.eta, config.max_iter);
    const auto p2 = iterate_plane([&](const Vector& r) { return llt2.solve(r); }, G, config.c4,
                                  +1.0, config.loss, config.eta, config.max_iter);
    model.positive_plane = p1.w;
    model.negative_plane = p2.w;
    model.iterations_pos = p1.iterations;
    model.iterations_neg = p2.iterations;
    model.converged_pos = p1.converged;
    model.converged_neg = p2.converged;
    return model;
}

TwinModel train_twin_kernel(const Dataset& data, const TwinConfig& config) {
    config.validate();
    data.validate();
    if (!config.kernel) throw usage_error("twin: kernel training requires a kernel spec");
    const ClassSplit cls = split_classes(data);

    const Matrix M = augment_columns(gram_matrix(*config.kernel, cls.pos, data.X));  // (l+1) x l+
    const Matrix N = augment_columns(gram_matrix(*config.kernel, cls.neg, data.X));

    const SmwOperator q1(M, config.c1);
    const SmwOperator q2(N, config.c3);

    TwinModel model;
    const auto p1 = iterate_plane([&](const Vector& r) { return q1.apply(r); }, N, config.c2,
                                  -1.0, config.loss, config.eta, config.max_iter);
    const auto p2 = iterate_plane([&](const Vector& r) { return q2.apply(r); }, M, config.c4,
                                  +1.0, config.loss, config.eta, config.max_iter);
    model.positive_plane = p1.w;
    model.negative_plane = p2.w;
    model.iterations_pos = p1.iterations;
    model.iterations_neg = p2.iterations;
    model.converged_pos = p1.converged;
    model.converged_neg = p2.converged;
    model.kernel = config.kernel;
    model.train_X = data.X;
    return model;
}

TwinModel train_twin(const Dataset& data, const TwinConfig& config) {
    return config.kernel ? train_twin_kernel(data, config) : train_twin_linear(data, config);
}

Eigen::VectorXi predict_twin(const TwinModel& model, const Matrix& X) {
    Eigen::VectorXi out(X.rows());
    if (!model.is_kernel()) {
        const Eigen::Index n = model.positive_plane.size() - 1;
        if (X.cols() != n) throw usage_error("predict: dimension mismatch");
        const Vector wp = model.positive_plane.head(n);
        const Vector wn = model.negative_plane.head(n);
        const double np = wp.norm(), nn = wn.norm();
        if (np == 0.0 || nn == 0.0)
            throw numeric_error("twin: degenerate model (zero-norm plane)");
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double dp = std::abs(X.row(i).dot(wp) + model.positive_plane(n)) / np;
            const double dn = std::abs(X.row(i).dot(wn) + model.negative_plane(n)) / nn;
            out(i) = dp <= dn ? 1 : -1;
        }
        return out;
    }

    const Eigen::Index l = model.train_X.rows();
    if (X.cols() != model.train_X.cols()) throw usage_error("predict: dimension mismatch");
    const Matrix Kxx = gram_matrix(*model.kernel, model.train_X, model.train_X);
    const Vector vp = model.positive_plane.head(l);
    const Vector vn = model.negative_plane.head(l);
    // quadratic forms can dip slightly negative at round-off; clamp before sqrt
    const double qp = std::max(vp.dot(Kxx * vp), 1e-12);
    const double qn = std::max(vn.dot(Kxx * vn), 1e-12);
    const double dp_den = std::sqrt(qp), dn_den = std::sqrt(qn);
    const Matrix Kt = gram_matrix(*model.kernel, X, model.train_X);  // rows: K(x, X^T)
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double fp = Kt.row(i).dot(vp) + model.positive_plane(l);
        const double fn = Kt.row(i).dot(vn) + model.negative_plane(l);
        out(i) = std::abs(fp) / dp_den <= std::abs(fn) / dn_den ? 1 : -1;
    }
    return out;
}

}  // namespace wavecls
