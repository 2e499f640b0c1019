#pragma once

#include <string>
#include <utility>

#include "npiv/basis.hpp"

namespace npiv {

//! n i.i.d. observations (y_i, z_i, w_i) with z_i, w_i in [0,1].
//! Immutable once constructed.
template <typename Scalar>
class BasicSample {
public:
  BasicSample(Vector<Scalar> y, Vector<Scalar> z, Vector<Scalar> w)
    : y_(std::move(y)), z_(std::move(z)), w_(std::move(w))
  {
    if (y_.size() == 0) {
      throw DomainError("sample must contain at least one row");
    }
    if (z_.size() != y_.size() || w_.size() != y_.size()) {
      throw DomainError("sample columns y, z, w must have equal length");
    }
    for (Index i = 0; i < y_.size(); ++i) {
      using std::isfinite;
      if (!isfinite(y_(i))) {
        throw DomainError("sample row " + std::to_string(i + 1) + ": y is not finite");
      }
      if (!(z_(i) >= Scalar(0) && z_(i) <= Scalar(1))) {
        throw DomainError("sample row " + std::to_string(i + 1) + ": z outside [0,1]");
      }
      if (!(w_(i) >= Scalar(0) && w_(i) <= Scalar(1))) {
        throw DomainError("sample row " + std::to_string(i + 1) + ": w outside [0,1]");
      }
    }
  }

  Index size() const { return y_.size(); }
  const Vector<Scalar>& y() const { return y_; }
  const Vector<Scalar>& z() const { return z_; }
  const Vector<Scalar>& w() const { return w_; }

  //! Same (z, w) design, responses multiplied by c.
  BasicSample scaled(Scalar c) const { return BasicSample(y_ * c, z_, w_); }

private:
  Vector<Scalar> y_;
  Vector<Scalar> z_;
  Vector<Scalar> w_;
};

using Sample = BasicSample<double>;

} // namespace npiv
