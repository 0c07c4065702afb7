#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("signals live on different time grids") {}
  explicit GridMismatch(const std::string& what) : Error(what) {}
};

class DegenerateSignal : public Error {
 public:
  using Error::Error;
};

/// Raised by Gram-Schmidt when a raw vector collapses after projection.
class DegenerateBasis : public Error {
 public:
  DegenerateBasis(std::size_t index, double residual_norm)
      : Error("raw basis vector " + std::to_string(index) +
              " is linearly dependent on previous modes (residual norm " +
              std::to_string(residual_norm) + ")"),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Non-finite state encountered while time stepping.
class Instability : public Error {
 public:
  Instability(const std::string& model, std::size_t sample, double time)
      : Error(model + " integration diverged at sample " + std::to_string(sample) +
              " (t = " + std::to_string(time) + ")"),
        sample_(sample) {}
  std::size_t sample() const noexcept { return sample_; }

 private:
  std::size_t sample_;
};

}  // namespace dfc
