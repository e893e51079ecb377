#pragma once

#include <Eigen/Dense>

namespace sbnoise {

using Vec3 = Eigen::Vector3d;

}  // namespace sbnoise
