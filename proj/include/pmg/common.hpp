#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmg {

using Point = std::array<double, 3>;

/// A cell mapping has a non-positive Jacobian determinant somewhere.
class DegenerateMesh : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents or vector sizes do not match.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense assembly was requested for a system larger than the cap.
class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The degree-1 patch space has more than one unconstrained node.
class MultiDofCoarse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested polynomial degree is not part of the patch degree sequence.
class DegreeNotInSequence : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace pmg
