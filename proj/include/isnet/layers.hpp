#pragma once

#include <optional>
#include <vector>

#include "isnet/activation.hpp"
#include "isnet/matrix.hpp"
#include "isnet/rng.hpp"

namespace isnet {

/// Fully connected layer. When has_bias is false the bias vector is
/// absent and never added in the forward pass (the inhibited-softmax
/// head requires its input layer to be bias-free).
struct DenseLayer {
    Matrix2D weights;          // in_dim x out_dim
    std::vector<double> bias;  // out_dim entries iff has_bias
    bool has_bias = true;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

inline Matrix2D dense_forward(const DenseLayer& layer, const Matrix2D& x) {
    if (x.cols() != layer.in_dim())
        throw ShapeError("dense_forward: input width differs from layer in_dim");
    Matrix2D out = matmul(x, layer.weights);
    if (layer.has_bias) out = add_row_broadcast(out, layer.bias);
    return out;
}

struct DenseGrads {
    Matrix2D x;                // same shape as input
    Matrix2D weights;          // same shape as weights
    std::vector<double> bias;  // empty when layer has no bias
};

/// Chain rule for the dense layer: grad_W = x^T grad_out,
/// grad_x = grad_out W^T, grad_bias = column sums of grad_out.
inline DenseGrads dense_backward(const DenseLayer& layer, const Matrix2D& x,
                                 const Matrix2D& grad_out) {
    if (x.cols() != layer.in_dim())
        throw ShapeError("dense_backward: input width differs from layer in_dim");
    if (grad_out.cols() != layer.out_dim() || grad_out.rows() != x.rows())
        throw ShapeError("dense_backward: grad_out shape inconsistent with forward");
    DenseGrads g;
    g.weights = matmul(transpose(x), grad_out);
    g.x = matmul(grad_out, transpose(layer.weights));
    if (layer.has_bias) g.bias = column_sums(grad_out);
    return g;
}

enum class DropoutMode {
    Train,             // fresh mask, inverted scaling
    EvalDeterministic, // identity
    EvalStochastic,    // fresh mask per pass (MC dropout)
};

struct DropoutLayer {
    double rate = 0.0; // in [0, 1)
};

/// Inverted dropout: survivors are scaled by 1/(1-rate) at mask time, so
/// deterministic evaluation is the identity map. The mask (already
/// scaled) is written to mask_out when provided, for the backward pass.
inline Matrix2D dropout_forward(const DropoutLayer& layer, const Matrix2D& x, DropoutMode mode,
                                RngStream* rng = nullptr, Matrix2D* mask_out = nullptr) {
    if (!(layer.rate >= 0.0 && layer.rate < 1.0))
        throw ConfigError("dropout rate must be in [0, 1)");
    ensure_finite(x, "dropout input");
    if (mode == DropoutMode::EvalDeterministic || layer.rate == 0.0) {
        if (mask_out) *mask_out = Matrix2D(x.rows(), x.cols(), 1.0);
        return x;
    }
    if (!rng)
        throw ConfigError("stochastic dropout requires an rng stream");
    const double keep_scale = 1.0 / (1.0 - layer.rate);
    Matrix2D mask(x.rows(), x.cols());
    for (double& m : mask.data())
        m = rng->unit() < layer.rate ? 0.0 : keep_scale;
    Matrix2D out = hadamard(x, mask);
    if (mask_out) *mask_out = std::move(mask);
    return out;
}

} // namespace isnet
