#pragma once

#include <Eigen/Dense>

namespace slab {

// Ambient dimensions never exceed 4, so points and small matrices live on the
// stack.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

}  // namespace slab
