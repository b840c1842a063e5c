#pragma once

#include <stdexcept>
#include <string>

namespace voxproj {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Mismatched dimensions or element counts between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegeneratePose : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidDisparity : public Error {
 public:
  using Error::Error;
};

class CameraInsideVolume : public Error {
 public:
  using Error::Error;
};

class MissingSupervision : public Error {
 public:
  using Error::Error;
};

class Divergence : public Error {
 public:
  Divergence(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// File and stream failures, including malformed content.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace voxproj
