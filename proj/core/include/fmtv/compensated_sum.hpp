#pragma once

#include <cmath>

namespace fmtv {

/// Neumaier's variant of Kahan summation. Handles addends larger than the
/// running sum, which happens when lattice rows of mixed sign are combined.
template <typename Real = double>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(Real initial) : sum_(initial) {}

  constexpr CompensatedSum& operator+=(Real value) {
    const Real t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  [[nodiscard]] constexpr Real value() const { return sum_ + compensation_; }
  constexpr explicit operator Real() const { return value(); }

 private:
  Real sum_ = Real{0};
  Real compensation_ = Real{0};
};

}  // namespace fmtv
