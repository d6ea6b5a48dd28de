#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace glim {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

// Relation matrices and the autoencoder matrices are stored row-major so
// that flattening a matrix is a plain view of its buffer.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

using Rng = std::mt19937_64;

}  // namespace glim
