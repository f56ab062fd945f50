#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "isnet/error.hpp"
#include "isnet/matrix.hpp"

namespace isnet {

/// Elementwise nonlinearities. The three kernel kinds are bounded bump
/// functions with range in [0, 1] and maximum 1 at u = 0; they are the
/// activations that make the inhibited-softmax head fall back to its
/// base-rate certainty away from the training region.
enum class ActivationKind {
    Identity,
    ReLU,
    CauchyKernel,   // 1 / (1 + u^2)
    GaussianKernel, // exp(-u^2 / 2)
    TriangleKernel, // min(u+1, -u+1) on |u| < 1, else 0
};

inline bool is_kernel(ActivationKind k) {
    return k == ActivationKind::CauchyKernel || k == ActivationKind::GaussianKernel ||
           k == ActivationKind::TriangleKernel;
}

inline const char* to_string(ActivationKind k) {
    switch (k) {
    case ActivationKind::Identity: return "identity";
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::CauchyKernel: return "cauchy";
    case ActivationKind::GaussianKernel: return "gaussian";
    case ActivationKind::TriangleKernel: return "triangle";
    }
    return "?";
}

inline ActivationKind activation_from_string(std::string_view s) {
    if (s == "identity") return ActivationKind::Identity;
    if (s == "relu") return ActivationKind::ReLU;
    if (s == "cauchy") return ActivationKind::CauchyKernel;
    if (s == "gaussian") return ActivationKind::GaussianKernel;
    if (s == "triangle") return ActivationKind::TriangleKernel;
    throw ConfigError("unknown activation: " + std::string(s));
}

inline double activation_value(ActivationKind k, double u) {
    switch (k) {
    case ActivationKind::Identity: return u;
    case ActivationKind::ReLU: return u > 0.0 ? u : 0.0;
    case ActivationKind::CauchyKernel: return 1.0 / (1.0 + u * u);
    case ActivationKind::GaussianKernel: return std::exp(-0.5 * u * u);
    case ActivationKind::TriangleKernel:
        return std::abs(u) < 1.0 ? std::min(u + 1.0, -u + 1.0) : 0.0;
    }
    return 0.0;
}

/// Derivative convention at kink points (ReLU at 0, triangle at 0 and
/// +-1) is 0.
inline double activation_slope(ActivationKind k, double u) {
    switch (k) {
    case ActivationKind::Identity: return 1.0;
    case ActivationKind::ReLU: return u > 0.0 ? 1.0 : 0.0;
    case ActivationKind::CauchyKernel: {
        const double d = 1.0 + u * u;
        return -2.0 * u / (d * d);
    }
    case ActivationKind::GaussianKernel: return -u * std::exp(-0.5 * u * u);
    case ActivationKind::TriangleKernel:
        if (u > -1.0 && u < 0.0) return 1.0;
        if (u > 0.0 && u < 1.0) return -1.0;
        return 0.0;
    }
    return 0.0;
}

inline Matrix2D activation_forward(ActivationKind k, const Matrix2D& u) {
    ensure_finite(u, "activation input");
    Matrix2D out = u;
    for (double& v : out.data()) v = activation_value(k, v);
    return out;
}

/// grad_out * f'(u), elementwise.
inline Matrix2D activation_backward(ActivationKind k, const Matrix2D& u, const Matrix2D& grad_out) {
    if (!u.same_shape(grad_out))
        throw ShapeError("activation_backward: shapes differ");
    Matrix2D out = grad_out;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] *= activation_slope(k, u.data()[i]);
    return out;
}

} // namespace isnet
