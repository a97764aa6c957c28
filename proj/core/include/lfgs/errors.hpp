#pragma once

#include <stdexcept>
#include <string>

namespace lfgs {

// Base class for all numerical failures raised by the library.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Smallest singular value at or below the rank tolerance; the projection onto
// the manifold is not well defined.
class RankDeficientError : public NumericalError {
 public:
  explicit RankDeficientError(const std::string& what) : NumericalError(what) {}
};

class NotOnManifoldError : public NumericalError {
 public:
  NotOnManifoldError(const std::string& what, double defect)
      : NumericalError(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_ = 0.0;
};

class NotConvergedError : public NumericalError {
 public:
  explicit NotConvergedError(const std::string& what) : NumericalError(what) {}
};

// Endpoints too far apart for single shooting; the caller must subdivide.
class TooFarApartError : public NumericalError {
 public:
  explicit TooFarApartError(const std::string& what) : NumericalError(what) {}
};

class IllPosedError : public NumericalError {
 public:
  IllPosedError(const std::string& what, int index = -1)
      : NumericalError(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_ = -1;
};

class SingularDiagonalError : public NumericalError {
 public:
  explicit SingularDiagonalError(const std::string& what)
      : NumericalError(what) {}
};

}  // namespace lfgs
