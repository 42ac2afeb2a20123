#include "wavecls/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wavecls {

namespace {

// log of lambda*u^2*e^{a*u}, valid for u != 0.
double log_wave_core(double a, double lambda, double u) {
    return std::log(lambda) + 2.0 * std::log(std::abs(u)) + a * u;
}

constexpr double kLogOverflow = 700.0;  // exp(700) is near the double limit

void require_finite(double u) {
    if (!std::isfinite(u)) throw usage_error("loss argument must be finite");
}

}  // namespace

WaveParams::WaveParams(double a_, double lambda_) : a(a_), lambda(lambda_) {
    if (!std::isfinite(a)) throw usage_error("wave loss: a must be finite");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw usage_error("wave loss: lambda must be positive");
}

LossSpec LossSpec::hinge() { return {LossKind::Hinge}; }

LossSpec LossSpec::pinball(double tau) {
    if (tau < 0.0 || tau > 1.0) throw usage_error("pinball: tau must be in [0,1]");
    LossSpec s{LossKind::Pinball};
    s.tau = tau;
    return s;
}

LossSpec LossSpec::ramp(double theta) {
    if (theta < 1.0) throw usage_error("ramp: theta must be >= 1");
    LossSpec s{LossKind::Ramp};
    s.theta = theta;
    return s;
}

LossSpec LossSpec::squared_hinge() { return {LossKind::SquaredHinge}; }

LossSpec LossSpec::smooth_pinball(double tau) {
    if (tau < 0.0 || tau > 1.0) throw usage_error("smooth pinball: tau must be in [0,1]");
    LossSpec s{LossKind::SmoothPinball};
    s.tau = tau;
    return s;
}

LossSpec LossSpec::linex(double a) {
    if (a == 0.0 || !std::isfinite(a)) throw usage_error("linex: a must be nonzero");
    LossSpec s{LossKind::Linex};
    s.a = a;
    return s;
}

LossSpec LossSpec::roboss(double a, double lambda) {
    if (!(a > 0.0)) throw usage_error("roboss: a must be positive");
    if (!(lambda > 0.0)) throw usage_error("roboss: lambda must be positive");
    LossSpec s{LossKind::Roboss};
    s.a = a;
    s.lambda = lambda;
    return s;
}

LossSpec LossSpec::wave(double a, double lambda) {
    WaveParams p(a, lambda);  // validates
    LossSpec s{LossKind::Wave};
    s.a = p.a;
    s.lambda = p.lambda;
    return s;
}

LossSpec LossSpec::zero_one_lambda(double lambda) {
    if (!(lambda > 0.0)) throw usage_error("zero-one: lambda must be positive");
    LossSpec s{LossKind::ZeroOneLambda};
    s.lambda = lambda;
    return s;
}

const char* LossSpec::name() const {
    switch (kind) {
        case LossKind::Hinge: return "hinge";
        case LossKind::Pinball: return "pinball";
        case LossKind::Ramp: return "ramp";
        case LossKind::SquaredHinge: return "squared-hinge";
        case LossKind::SmoothPinball: return "smooth-pinball";
        case LossKind::Linex: return "linex";
        case LossKind::Roboss: return "roboss";
        case LossKind::Wave: return "wave";
        case LossKind::ZeroOneLambda: return "zero-one";
    }
    return "?";
}

double eval_loss(const LossSpec& spec, double u) {
    require_finite(u);
    switch (spec.kind) {
        case LossKind::Hinge:
            return std::max(u, 0.0);
        case LossKind::Pinball:
            return u >= 0.0 ? u : -spec.tau * u;
        case LossKind::Ramp:
            if (u >= spec.theta) return spec.theta;
            return u > 0.0 ? u : 0.0;
        case LossKind::SquaredHinge:
            return u > 0.0 ? u * u : 0.0;
        case LossKind::SmoothPinball: {
            const double s = u > 0.0 ? spec.tau * u : (1.0 - spec.tau) * u;
            return s * s;
        }
        case LossKind::Linex:
            return std::exp(spec.a * u) - spec.a * u - 1.0;
        case LossKind::Roboss:
            if (u <= 0.0) return 0.0;
            return spec.lambda * (1.0 - (spec.a * u + 1.0) * std::exp(-spec.a * u));
        case LossKind::Wave: {
            if (u == 0.0) return 0.0;
            const double lt = log_wave_core(spec.a, spec.lambda, u);
            if (lt > kLogOverflow) return 1.0 / spec.lambda;  // saturated regime
            const double t = std::exp(lt);
            return (1.0 / spec.lambda) * (t / (1.0 + t));
        }
        case LossKind::ZeroOneLambda:
            return u > 0.0 ? 1.0 / spec.lambda : 0.0;
    }
    throw usage_error("unknown loss kind");
}

double grad_wave(const WaveParams& params, double u) {
    require_finite(u);
    if (u == 0.0) return 0.0;
    const double lt = log_wave_core(params.a, params.lambda, u);
    // t/(1+t)^2 <= 1/t, so the derivative underflows to 0 long before exp(lt)
    // would overflow.
    if (lt > kLogOverflow) return 0.0;
    const double t = std::exp(lt);
    return (params.a * u + 2.0) * t / (params.lambda * u * (1.0 + t) * (1.0 + t));
}

double conditional_risk(const LossSpec& spec, double f, double p) {
    if (!(p > 0.0 && p < 1.0)) throw usage_error("conditional risk: p must be in (0,1)");
    return eval_loss(spec, 1.0 - f) * p + eval_loss(spec, 1.0 + f) * (1.0 - p);
}

CalibrationQuery::CalibrationQuery(double p_, std::vector<double> grid)
    : p(p_), f_grid(std::move(grid)) {
    if (!(p > 0.0 && p < 1.0) || p == 0.5)
        throw usage_error("calibration: p must be in (0,1) and != 0.5");
    if (f_grid.empty()) throw usage_error("calibration: empty grid");
    for (std::size_t i = 1; i < f_grid.size(); ++i)
        if (!(f_grid[i] > f_grid[i - 1]))
            throw usage_error("calibration: grid must be strictly increasing");
    if (f_grid.front() >= 0.0 || f_grid.back() <= 0.0)
        throw usage_error("calibration: grid must span negative and positive scores");
}

CalibrationQuery CalibrationQuery::uniform(double p, double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo)) throw usage_error("calibration: bad grid range");
    std::vector<double> g;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
    g.reserve(n + 1);
    for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
    return CalibrationQuery(p, std::move(g));
}

double calibration_argmin(const LossSpec& spec, const CalibrationQuery& query) {
    double best_f = query.f_grid.front();
    double best_r = conditional_risk(spec, best_f, query.p);
    for (std::size_t i = 1; i < query.f_grid.size(); ++i) {
        const double f = query.f_grid[i];
        const double r = conditional_risk(spec, f, query.p);
        if (r < best_r) {
            best_r = r;
            best_f = f;
        } else if (r == best_r) {
            // smaller magnitude wins; at equal magnitude keep the negative one
            if (std::abs(f) < std::abs(best_f)) best_f = f;
        }
    }
    return best_f;
}

void write_loss_curve(std::ostream& out, const LossSpec& spec, double lo, double hi,
                      int samples) {
    if (samples < 2) throw usage_error("loss curve: need at least 2 samples");
    const bool with_grad = spec.kind == LossKind::Wave;
    out << (with_grad ? "u,loss,grad\n" : "u,loss\n");
    out.precision(std::numeric_limits<double>::max_digits10);
    for (int i = 0; i < samples; ++i) {
        const double u = lo + (hi - lo) * i / (samples - 1);
        out << u << ',' << eval_loss(spec, u);
        if (with_grad) out << ',' << grad_wave(WaveParams(spec.a, spec.lambda), u);
        out << '\n';
    }
}

}  // namespace wavecls
