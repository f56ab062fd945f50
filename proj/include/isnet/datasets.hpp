#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "isnet/error.hpp"
#include "isnet/matrix.hpp"
#include "isnet/rng.hpp"

namespace isnet {

struct Dataset {
    Matrix2D features;
    std::vector<std::size_t> labels;
    std::size_t n_classes = 0;

    std::size_t size() const { return features.rows(); }
};

inline void validate(const Dataset& d) {
    if (d.features.rows() != d.labels.size())
        throw DataError("dataset: feature rows and labels misaligned");
    for (std::size_t l : d.labels)
        if (l >= d.n_classes)
            throw DataError("dataset: label out of class range");
    ensure_finite(d.features, "dataset features");
}

struct XorToyConfig {
    std::size_t n_samples = 500;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

/// 2-D toy set: Gaussian clouds around the four XOR corners (+-1, +-1),
/// labelled by the XOR of the corner signs, balanced by round-robin
/// assignment. Same-sign corners are class 0, mixed-sign class 1.
inline Dataset gen_xor(const XorToyConfig& cfg) {
    if (cfg.n_samples < 4)
        throw ConfigError("gen_xor: need at least 4 samples");
    if (cfg.noise_sd < 0.0)
        throw ConfigError("gen_xor: noise_sd must be >= 0");
    static constexpr std::array<std::array<double, 2>, 4> corners = {{
        {{1.0, 1.0}}, {{-1.0, -1.0}}, {{1.0, -1.0}}, {{-1.0, 1.0}},
    }};
    static constexpr std::array<std::size_t, 4> corner_label = {0, 0, 1, 1};
    RngStream rng(cfg.seed, 0);
    Dataset d;
    d.n_classes = 2;
    d.features = Matrix2D(cfg.n_samples, 2);
    d.labels.resize(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        const std::size_t c = i % 4;
        d.features(i, 0) = corners[c][0] + rng.normal(0.0, cfg.noise_sd);
        d.features(i, 1) = corners[c][1] + rng.normal(0.0, cfg.noise_sd);
        d.labels[i] = corner_label[c];
    }
    return d;
}

struct BlobOodConfig {
    std::vector<std::array<double, 2>> in_centers = {{{-2.0, 0.0}}, {{2.0, 0.0}}};
    double ood_shift = 5.0;
    std::size_t per_class = 200;
    double sd = 0.5;
    std::uint64_t seed = 0;
};

/// In-distribution Gaussian clusters, one class per center, plus a ring
/// of foreign clusters. Ring centers sit on a circle around the
/// in-center centroid with radius ood_shift + max distance of any
/// in-center from the centroid, so every ring center is at distance at
/// least ood_shift from every in-center. The foreign set carries no
/// labels (all zero, single pseudo-class).
inline std::pair<Dataset, Dataset> gen_blobs_ood(const BlobOodConfig& cfg) {
    if (cfg.in_centers.size() < 2)
        throw ConfigError("gen_blobs_ood: need at least 2 in-distribution centers");
    if (!(cfg.ood_shift > 0.0))
        throw ConfigError("gen_blobs_ood: ood_shift must be positive");
    RngStream rng(cfg.seed, 0);

    Dataset in_dist;
    in_dist.n_classes = cfg.in_centers.size();
    const std::size_t n_in = cfg.per_class * cfg.in_centers.size();
    in_dist.features = Matrix2D(n_in, 2);
    in_dist.labels.resize(n_in);
    std::size_t row = 0;
    for (std::size_t c = 0; c < cfg.in_centers.size(); ++c) {
        for (std::size_t i = 0; i < cfg.per_class; ++i, ++row) {
            in_dist.features(row, 0) = cfg.in_centers[c][0] + rng.normal(0.0, cfg.sd);
            in_dist.features(row, 1) = cfg.in_centers[c][1] + rng.normal(0.0, cfg.sd);
            in_dist.labels[row] = c;
        }
    }

    double cx = 0.0, cy = 0.0;
    for (const auto& c : cfg.in_centers) {
        cx += c[0];
        cy += c[1];
    }
    cx /= static_cast<double>(cfg.in_centers.size());
    cy /= static_cast<double>(cfg.in_centers.size());
    double spread = 0.0;
    for (const auto& c : cfg.in_centers)
        spread = std::max(spread, std::hypot(c[0] - cx, c[1] - cy));
    const double radius = cfg.ood_shift + spread;

    constexpr std::size_t n_ring = 8;
    Dataset ood;
    ood.n_classes = 1;
    ood.features = Matrix2D(n_in, 2);
    ood.labels.assign(n_in, 0);
    for (std::size_t i = 0; i < n_in; ++i) {
        const double angle = (2.0 * 3.141592653589793 * static_cast<double>(i % n_ring)) /
                                 static_cast<double>(n_ring) +
                             0.39269908169872414; // pi/8 offset
        ood.features(i, 0) = cx + radius * std::cos(angle) + rng.normal(0.0, cfg.sd);
        ood.features(i, 1) = cy + radius * std::sin(angle) + rng.normal(0.0, cfg.sd);
    }
    return {std::move(in_dist), std::move(ood)};
}

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw TruncatedFileError("truncated IDX file: " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

} // namespace detail

/// Reads an IDX image/label pair (big-endian, magic 2051/2049). Pixels
/// are scaled to [0, 1] by dividing by 255 and flattened row-major.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img)
        throw DataError("cannot open IDX image file: " + images_path);
    if (detail::read_be32(img, images_path) != 0x00000803u)
        throw BadMagicError("bad IDX image magic in " + images_path);
    const std::uint32_t n_images = detail::read_be32(img, images_path);
    const std::uint32_t n_rows = detail::read_be32(img, images_path);
    const std::uint32_t n_cols = detail::read_be32(img, images_path);

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab)
        throw DataError("cannot open IDX label file: " + labels_path);
    if (detail::read_be32(lab, labels_path) != 0x00000801u)
        throw BadMagicError("bad IDX label magic in " + labels_path);
    const std::uint32_t n_labels = detail::read_be32(lab, labels_path);
    if (n_labels != n_images)
        throw CountMismatchError("IDX image/label counts differ: " + std::to_string(n_images) +
                                 " vs " + std::to_string(n_labels));

    const std::size_t dim = static_cast<std::size_t>(n_rows) * n_cols;
    Dataset d;
    d.features = Matrix2D(n_images, dim);
    d.labels.resize(n_images);
    std::vector<unsigned char> buf(dim);
    for (std::size_t i = 0; i < n_images; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim));
        if (!img)
            throw TruncatedFileError("truncated IDX file: " + images_path);
        for (std::size_t j = 0; j < dim; ++j)
            d.features(i, j) = static_cast<double>(buf[j]) / 255.0;
    }
    std::size_t max_label = 0;
    for (std::size_t i = 0; i < n_labels; ++i) {
        unsigned char l;
        lab.read(reinterpret_cast<char*>(&l), 1);
        if (!lab)
            throw TruncatedFileError("truncated IDX file: " + labels_path);
        d.labels[i] = l;
        max_label = std::max<std::size_t>(max_label, l);
    }
    d.n_classes = max_label + 1;
    return d;
}

/// x -> 1 - x on every pixel; requires features already in [0, 1].
inline Dataset negate_images(const Dataset& d) {
    for (double v : d.features.data())
        if (v < 0.0 || v > 1.0)
            throw DataError("negate_images: feature outside [0, 1]");
    Dataset out = d;
    for (double& v : out.features.data()) v = 1.0 - v;
    return out;
}

struct SplitResult {
    Dataset train, val, test;
};

/// Deterministic shuffled partition into train/val/test. Fractions must
/// sum to 1; a split whose fraction is positive must receive at least
/// one sample.
inline SplitResult split(const Dataset& d, std::array<double, 3> fractions, std::uint64_t seed) {
    double total = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("split: fractions must sum to 1");
    const std::size_t n = d.size();
    if (n == 0)
        throw DataError("split: empty dataset");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(seed, 0);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);

    const std::size_t n_train = static_cast<std::size_t>(fractions[0] * static_cast<double>(n));
    const std::size_t n_val = static_cast<std::size_t>(fractions[1] * static_cast<double>(n));
    const std::size_t n_test = n - n_train - n_val;
    const std::array<std::size_t, 3> sizes = {n_train, n_val, n_test};
    for (int i = 0; i < 3; ++i)
        if (fractions[i] > 0.0 && sizes[i] == 0)
            throw DataError("split: requested fraction produces an empty split");

    auto take = [&](std::size_t begin, std::size_t count) {
        Dataset out;
        out.n_classes = d.n_classes;
        out.features = Matrix2D(count, d.features.cols());
        out.labels.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t src = order[begin + i];
            for (std::size_t j = 0; j < d.features.cols(); ++j)
                out.features(i, j) = d.features(src, j);
            out.labels[i] = d.labels[src];
        }
        return out;
    };
    return {take(0, n_train), take(n_train, n_val), take(n_train + n_val, n_test)};
}

/// Splits a labelled set into an in-distribution part (held classes
/// removed, remaining labels re-indexed densely in ascending order) and
/// a foreign part made of the held-out classes with labels discarded.
inline std::pair<Dataset, Dataset> holdout_class_ood(const Dataset& d,
                                                     const std::vector<std::size_t>& held_classes) {
    if (held_classes.empty())
        throw ConfigError("holdout_class_ood: no classes held out");
    std::vector<bool> held(d.n_classes, false);
    for (std::size_t c : held_classes) {
        if (c >= d.n_classes)
            throw ConfigError("holdout_class_ood: held class out of range");
        held[c] = true;
    }
    std::vector<std::size_t> remap(d.n_classes, 0);
    std::size_t next = 0;
    for (std::size_t c = 0; c < d.n_classes; ++c)
        if (!held[c]) remap[c] = next++;
    if (next == 0)
        throw ConfigError("holdout_class_ood: cannot hold out every class");

    std::vector<std::size_t> in_rows, ood_rows;
    for (std::size_t i = 0; i < d.size(); ++i)
        (held[d.labels[i]] ? ood_rows : in_rows).push_back(i);

    auto gather = [&](const std::vector<std::size_t>& rows, bool keep_labels,
                      std::size_t n_classes) {
        Dataset out;
        out.n_classes = n_classes;
        out.features = Matrix2D(rows.size(), d.features.cols());
        out.labels.resize(rows.size(), 0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < d.features.cols(); ++j)
                out.features(i, j) = d.features(rows[i], j);
            if (keep_labels) out.labels[i] = remap[d.labels[rows[i]]];
        }
        return out;
    };
    return {gather(in_rows, true, next), gather(ood_rows, false, 1)};
}

} // namespace isnet
