#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace iopeg {

using Index = std::int64_t;
using Vec2 = std::array<double, 2>;

/// Error categories. The numeric values are part of the C API.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  DegenerateCell = 2,
  NotSpd = 3,
  NotSymmetric = 4,
  DimensionMismatch = 5,
  Breakdown = 6,
  NotConverged = 7,
  Io = 8,
  Internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

}  // namespace iopeg
