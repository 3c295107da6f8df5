#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace halfspace {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

// Real argument on a band segment where only a one-sided limit exists.
class BoundaryPoint : public Error {
 public:
  using Error::Error;
};

class ThresholdPoint : public Error {
 public:
  using Error::Error;
};

// u + G R0 G* numerically singular; at a real energy this signals an eigenvalue.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class WrongEntryPoint : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class RadiusExceeded : public Error {
 public:
  using Error::Error;
};

class UndefinedPair : public Error {
 public:
  using Error::Error;
};

class InvalidRun : public Error {
 public:
  using Error::Error;
};

}  // namespace halfspace
