// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace dass {

template <class Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Vector3d = Vector3<double>;
using Vector2d = Vector2<double>;

using VertexId = std::uint32_t;
using FaceId = std::uint32_t;
using ChartId = std::uint32_t;
/// 0 marks a boundary vertex; i > 0 marks an inner vertex of chart i.
using Label = std::uint32_t;

inline constexpr std::uint32_t kInvalidId = 0xffffffffu;

}  // namespace dass
