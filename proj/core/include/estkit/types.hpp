#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace estkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParamError : public Error { public: using Error::Error; };
class UnboundedError : public Error { public: using Error::Error; };
class NoRepresentationError : public Error { public: using Error::Error; };
class NoClosedFormError : public Error { public: using Error::Error; };
class ZeroInputError : public Error { public: using Error::Error; };
class NotConvergedError : public Error { public: using Error::Error; };
class EmptyIntersectionError : public Error { public: using Error::Error; };
class NonInformativeError : public Error { public: using Error::Error; };
class InvalidLinkError : public Error { public: using Error::Error; };
class InsufficientPairsError : public Error { public: using Error::Error; };
class NotFeasibleError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

inline constexpr const char* kVersion = "0.1.0";

// tr(X^T Y) on flattened storage equals the plain dot product; matrices are
// kept as column-major flattened vectors with (d1, d2) carried alongside.
inline Eigen::Map<const Matrix> as_matrix(const Vector& x, Index d1, Index d2) {
  if (x.size() != d1 * d2) throw InvalidParamError("as_matrix: size mismatch");
  return Eigen::Map<const Matrix>(x.data(), d1, d2);
}

inline Vector flatten(const Matrix& X) {
  return Eigen::Map<const Vector>(X.data(), X.size());
}

}  // namespace estkit
