#pragma once

#include <stdexcept>
#include <string>

namespace centroflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampled field that should be a support function is not positive.
class NotACurve : public Error {
 public:
  explicit NotACurve(double min_value);
  double min_value() const noexcept { return min_value_; }

 private:
  double min_value_;
};

/// The radius of curvature s'' + s is not positive somewhere on the grid.
class NotConvex : public Error {
 public:
  NotConvex(int index, double radius);
  int index() const noexcept { return index_; }
  double radius() const noexcept { return radius_; }

 private:
  int index_;
  double radius_;
};

/// A linear map offered as an element of SL(2) does not have unit determinant.
class InvalidMap : public Error {
 public:
  explicit InvalidMap(double det);
  double det() const noexcept { return det_; }

 private:
  double det_;
};

/// A scalar argument is outside its admissible range.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Grid size or symmetry requirements are violated.
class InvalidGrid : public Error {
 public:
  using Error::Error;
};

/// The winding map (-B, Phi') passes through the origin.
class OriginHit : public Error {
 public:
  OriginHit(double x, double norm);
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Raised inside the flow when the radius of curvature drops below r_min.
class ConvexityLost : public Error {
 public:
  ConvexityLost(long step, int index, double radius);
  long step() const noexcept { return step_; }
  int index() const noexcept { return index_; }

 private:
  long step_;
  int index_;
};

/// Invalid experiment configuration (CLI and config parsing).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace centroflow
