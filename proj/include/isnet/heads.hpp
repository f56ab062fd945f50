#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "isnet/error.hpp"
#include "isnet/matrix.hpp"

namespace isnet {

/// Rowwise softmax with max-subtraction. Rows sum to 1 within 1e-12.
inline Matrix2D softmax_forward(const Matrix2D& logits) {
    ensure_finite(logits, "softmax logits");
    Matrix2D out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        double m = logits(r, 0);
        for (std::size_t c = 1; c < logits.cols(); ++c) m = std::max(m, logits(r, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) {
            out(r, c) = std::exp(logits(r, c) - m);
            sum += out(r, c);
        }
        for (std::size_t c = 0; c < logits.cols(); ++c) out(r, c) /= sum;
    }
    return out;
}

/// Output head that extends the softmax normaliser with a constant
/// pseudo-input a. The implied extra channel P_u = exp(a) / (sum_j
/// exp(x_j) + exp(a)) acts as the uncertainty score; the mass assigned
/// to real classes, P_c = 1 - P_u, is the certainty factor. a is a
/// fixed hyperparameter, never trained.
struct InhibitedSoftmaxHead {
    std::size_t n_classes = 0;
    double a = 1.0;
};

/// Class probabilities plus, for the inhibited-softmax head, the
/// artificial channel's output per sample.
struct HeadOutput {
    Matrix2D class_probs;             // batch x n_classes
    std::vector<double> uncertainty;  // P_u per row; empty for plain softmax

    bool has_uncertainty() const { return !uncertainty.empty(); }
};

/// IS_a(x)_i = exp(x_i) / (sum_j exp(x_j) + exp(a)), stabilised by
/// subtracting max(x_1..x_n, a). Class outputs plus the uncertainty
/// channel sum to 1.
inline HeadOutput is_forward(const InhibitedSoftmaxHead& head, const Matrix2D& logits) {
    if (logits.cols() != head.n_classes)
        throw ShapeError("is_forward: logits width differs from n_classes");
    ensure_finite(logits, "is_forward logits");
    HeadOutput out;
    out.class_probs = Matrix2D(logits.rows(), logits.cols());
    out.uncertainty.resize(logits.rows());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        double m = head.a;
        for (std::size_t c = 0; c < logits.cols(); ++c) m = std::max(m, logits(r, c));
        double sum_e = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) {
            out.class_probs(r, c) = std::exp(logits(r, c) - m);
            sum_e += out.class_probs(r, c);
        }
        const double ea = std::exp(head.a - m);
        const double denom = sum_e + ea;
        for (std::size_t c = 0; c < logits.cols(); ++c) out.class_probs(r, c) /= denom;
        out.uncertainty[r] = ea / denom;
    }
    return out;
}

/// Certainty factor P_c(x) = sum_j exp(x_j) / (sum_j exp(x_j) + exp(a))
/// per row, computed as 1 - P_u so the two channels sum to one as
/// returned.
inline std::vector<double> certainty_factor(const InhibitedSoftmaxHead& head,
                                            const Matrix2D& logits) {
    HeadOutput out = is_forward(head, logits);
    std::vector<double> pc(out.uncertainty.size());
    for (std::size_t r = 0; r < pc.size(); ++r) pc[r] = 1.0 - out.uncertainty[r];
    return pc;
}

struct LossConfig {
    double evidence_lambda = 0.0; // lambda = 0 disables evidence regularisation
    double weight_decay = 0.0;    // applied by the optimizer, weights only
};

namespace detail {

inline void check_targets(const std::vector<std::size_t>& targets, std::size_t batch,
                          std::size_t n_classes) {
    if (targets.size() != batch)
        throw ShapeError("targets length differs from batch size");
    for (std::size_t t : targets)
        if (t >= n_classes)
            throw DataError("target class out of range");
}

/// log(sum_j exp(x_j) [+ exp(a)]) with max-subtraction; extra = a or
/// -inf for none.
inline double row_logsumexp(const Matrix2D& logits, std::size_t r, double extra) {
    double m = extra;
    for (std::size_t c = 0; c < logits.cols(); ++c) m = std::max(m, logits(r, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) sum += std::exp(logits(r, c) - m);
    if (std::isfinite(extra)) sum += std::exp(extra - m);
    return m + std::log(sum);
}

} // namespace detail

struct SoftmaxLoss {
    double loss = 0.0;
    Matrix2D grad_logits; // d loss / d logits, already divided by batch size
};

/// Mean cross-entropy -log S(x)_t. Per-sample gradient is
/// S(x)_i - 1{i==t}, divided by the batch size so that it differentiates
/// the returned mean.
inline SoftmaxLoss ce_loss_softmax(const Matrix2D& logits, const std::vector<std::size_t>& targets) {
    ensure_finite(logits, "ce_loss_softmax logits");
    detail::check_targets(targets, logits.rows(), logits.cols());
    const double inv_b = 1.0 / static_cast<double>(logits.rows());
    SoftmaxLoss result;
    result.grad_logits = softmax_forward(logits);
    double total = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const double lse = detail::row_logsumexp(logits, r, -std::numeric_limits<double>::infinity());
        total += lse - logits(r, targets[r]);
        result.grad_logits(r, targets[r]) -= 1.0;
    }
    for (double& g : result.grad_logits.data()) g *= inv_b;
    result.loss = total * inv_b;
    return result;
}

struct IsLoss {
    double loss = 0.0;
    Matrix2D grad_logits;          // divided by batch size
    Matrix2D grad_penultimate_reg; // evidence term only, divided by batch size
};

/// Inhibited-softmax cross-entropy with evidence regularisation:
///
///   loss = mean[-log IS_a(x)_t] - lambda * mean[l1(x_p)]
///
/// grad_logits per sample is IS_a(x)_i - 1{i==t}; the regulariser
/// contributes -lambda * sign(x_p) (sign(0) = 0) at the penultimate
/// activations, where the caller adds it into the backward pass. Both
/// gradients are divided by the batch size, matching the mean loss.
inline IsLoss ce_loss_is(const InhibitedSoftmaxHead& head, const Matrix2D& logits,
                         const std::vector<std::size_t>& targets, const Matrix2D& penultimate,
                         const LossConfig& cfg) {
    if (cfg.evidence_lambda < 0.0)
        throw ConfigError("evidence_lambda must be >= 0");
    if (penultimate.rows() != logits.rows())
        throw ShapeError("ce_loss_is: penultimate batch differs from logits batch");
    ensure_finite(logits, "ce_loss_is logits");
    ensure_finite(penultimate, "ce_loss_is penultimate");
    detail::check_targets(targets, logits.rows(), head.n_classes);

    const double inv_b = 1.0 / static_cast<double>(logits.rows());
    IsLoss result;
    HeadOutput out = is_forward(head, logits);
    result.grad_logits = out.class_probs;
    double total = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        total += detail::row_logsumexp(logits, r, head.a) - logits(r, targets[r]);
        result.grad_logits(r, targets[r]) -= 1.0;
    }
    for (double& g : result.grad_logits.data()) g *= inv_b;

    double l1_total = 0.0;
    for (double v : penultimate.data()) l1_total += std::abs(v);
    result.loss = total * inv_b - cfg.evidence_lambda * l1_total * inv_b;

    result.grad_penultimate_reg = Matrix2D(penultimate.rows(), penultimate.cols(), 0.0);
    if (cfg.evidence_lambda > 0.0) {
        const double c = -cfg.evidence_lambda * inv_b;
        for (std::size_t i = 0; i < penultimate.size(); ++i) {
            const double v = penultimate.data()[i];
            result.grad_penultimate_reg.data()[i] = v > 0.0 ? c : (v < 0.0 ? -c : 0.0);
        }
    }
    return result;
}

/// d log P_c / d b_i = S(x)_i - IS_a(x)_i, the analytic gradient of the
/// log certainty factor with respect to a final-layer bias. Every entry
/// is strictly positive, which is why the head's input layer must not
/// have bias terms: training could inflate certainty through the biases
/// without touching the classification loss.
inline Matrix2D log_certainty_bias_gradient(const InhibitedSoftmaxHead& head,
                                            const Matrix2D& logits) {
    Matrix2D s = softmax_forward(logits);
    HeadOutput is = is_forward(head, logits);
    Matrix2D out(s.rows(), s.cols());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = s.data()[i] - is.class_probs.data()[i];
    return out;
}

/// |l_S(x + delta*1, t) - l_S(x, t)|. Softmax cross-entropy is invariant
/// to uniform logit shifts (<= 1e-9 numerically), which is the mechanism
/// that makes an all-bias increase a trivial way to inflate P_c.
inline double bias_direction_invariance_check(const Matrix2D& logits,
                                              const std::vector<std::size_t>& targets,
                                              double delta = 1.0) {
    Matrix2D shifted = logits;
    for (double& v : shifted.data()) v += delta;
    return std::abs(ce_loss_softmax(shifted, targets).loss - ce_loss_softmax(logits, targets).loss);
}

} // namespace isnet
