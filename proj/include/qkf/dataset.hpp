#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkf/types.hpp"

namespace qkf {

enum class Task { Regression, Classification };

struct RawTable {
    std::string name;
    Task task = Task::Regression;
    Matrix features;  // rows x d
    Vector labels;    // quality score, or +-1
};

struct ScalingRecord {
    Vector feature_min;
    Vector feature_max;
    std::vector<int> constant_features;  // mapped to pi/2

    Vector apply(const Vector& raw) const;
};

struct DatasetSplit {
    std::string name;
    Task task = Task::Regression;
    Matrix train_x;  // angles in [0, pi]
    Vector train_y;
    Matrix test_x;
    Vector test_y;
    ScalingRecord scaling;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(train_x.cols()); }
};

// Semicolon-delimited white-wine file: 11 numeric columns + `quality`.
RawTable load_wine_quality(const std::string& path);

// Comma-delimited magic04 file: 10 numeric columns + class letter g/h.
RawTable load_magic04(const std::string& path);

// Seeded uniform shuffle; per-feature min/max from the training portion only;
// affine map to [0, pi] with test features clipped into range.
DatasetSplit scale_and_split(const RawTable& raw, Eigen::Index m_train,
                             Eigen::Index m_test, std::uint64_t seed);

}  // namespace qkf
