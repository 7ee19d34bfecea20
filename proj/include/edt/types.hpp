#ifndef EDT_TYPES_HPP
#define EDT_TYPES_HPP

#include <Eigen/Core>

#include <string>
#include <vector>

namespace edt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Labels = std::vector<std::string>;

// Absolute tolerance used when validating that a vector lies on the simplex.
inline constexpr double kSimplexTolerance = 1e-9;

// Throws ErrorKind::Dimension / ErrorKind::Domain if gamma is not a point of S_m.
void require_simplex(Vector const& gamma, Eigen::Index expected_size, char const* what);

} // namespace edt

#endif
