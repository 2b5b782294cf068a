#include "ltforge/felement.hpp"

#include <algorithm>
#include <sstream>

namespace ltforge {

namespace {

void check_fields(const FElement& a, const FElement& b) {
  if (a.field() != b.field() && a.field() != nullptr && b.field() != nullptr)
    throw Error(ErrorKind::MixedSpec, "operands belong to different fields");
}

Field pick(const FElement& a, const FElement& b) { return a.field() ? a.field() : b.field(); }

}  // namespace

FElement FElement::zero(Field field, int abs_precision) {
  FElement r;
  r.field_ = field;
  r.zero_ = true;
  r.abs_ = abs_precision;
  return r;
}

FElement FElement::from_of(const OFElement& x) {
  FElement r;
  r.field_ = x.field();
  const int v = x.val_pi();
  if (v >= x.precision()) return zero(x.field(), x.precision());
  r.zero_ = false;
  r.val_ = v;
  r.unit_ = x.div_pi(v);
  r.abs_ = x.precision();
  return r;
}

FElement FElement::from_int(Field field, std::int64_t v, int abs_precision) {
  return from_of(OFElement::from_int(field, v, abs_precision));
}

FElement FElement::pi_power(Field field, int k, int rel) {
  FElement r;
  r.field_ = field;
  r.zero_ = false;
  r.val_ = k;
  r.unit_ = OFElement::one(field, rel);
  r.abs_ = k + rel;
  return r;
}

FElement FElement::one_like() const { return pi_power(field_, 0, field_->max_precision()); }

FElement FElement::truncated(int abs_precision) const {
  if (abs_precision >= abs_) return *this;
  if (zero_ || abs_precision <= val_) return zero(field_, abs_precision);
  FElement r = *this;
  r.unit_ = unit_.with_precision(abs_precision - val_);
  r.abs_ = abs_precision;
  return r;
}

FElement FElement::operator+(const FElement& o) const {
  check_fields(*this, o);
  const int A = std::min(abs_, o.abs_);
  if (zero_) return o.truncated(A);
  if (o.zero_) return truncated(A);
  const Field F = field_;
  const int v = std::min(val_, o.val_);
  if (A <= v) return zero(F, A);
  const int r = A - v;
  auto term = [&](const FElement& x) {
    const int k = x.val_ - v;
    const int need = r - k;
    if (need <= 0) return OFElement::zero(F, r);
    return x.unit_.with_precision(need).extended(r).mul_pi(k);
  };
  OFElement s = term(*this) + term(o);
  const int k = s.val_pi();
  if (k >= r) return zero(F, A);
  FElement out;
  out.field_ = F;
  out.zero_ = false;
  out.val_ = v + k;
  out.unit_ = s.div_pi(k);
  out.abs_ = A;
  return out;
}

FElement FElement::operator-() const {
  if (zero_) return *this;
  FElement r = *this;
  r.unit_ = -unit_;
  return r;
}

FElement FElement::operator-(const FElement& o) const { return *this + (-o); }

FElement FElement::operator*(const FElement& o) const {
  check_fields(*this, o);
  const Field F = pick(*this, o);
  if (zero_ && o.zero_) return zero(F, std::min(kExact, abs_ + o.abs_));
  if (zero_) return zero(F, std::min(kExact, abs_ + o.val_));
  if (o.zero_) return zero(F, std::min(kExact, o.abs_ + val_));
  const int r = std::min(unit_.precision(), o.unit_.precision());
  FElement out;
  out.field_ = F;
  out.zero_ = false;
  out.val_ = val_ + o.val_;
  out.unit_ = unit_.with_precision(r) * o.unit_.with_precision(r);
  out.abs_ = out.val_ + r;
  return out;
}

FElement FElement::inv() const {
  if (zero_) throw Error(ErrorKind::NotAUnit, "zero has no inverse in F");
  FElement r = *this;
  r.val_ = -val_;
  r.unit_ = unit_.inv();
  r.abs_ = r.val_ + r.unit_.precision();
  return r;
}

FElement FElement::shift(int k) const {
  FElement r = *this;
  if (zero_) {
    r.abs_ = abs_ >= kExact ? kExact : abs_ + k;
    return r;
  }
  r.val_ += k;
  r.abs_ += k;
  return r;
}

OFElement FElement::to_of(int N) const {
  if (abs_ < N)
    throw Error(ErrorKind::PrecisionExhausted,
                "only " + std::to_string(abs_) + " absolute digits known, " + std::to_string(N) + " requested");
  if (zero_) return OFElement::zero(field_, N);
  if (val_ < 0) throw Error(ErrorKind::IntegralityFailure, "coefficient has valuation " + std::to_string(val_));
  if (val_ >= N) return OFElement::zero(field_, N);
  return unit_.with_precision(N - val_).extended(N).mul_pi(val_);
}

std::string FElement::to_string() const {
  if (zero_) return "O(pi^" + std::to_string(abs_) + ")";
  std::ostringstream os;
  os << "pi^" << val_ << " * (" << unit_.to_string() << ")";
  return os.str();
}

bool equal_within_precision(const FElement& x, const FElement& y) { return (x - y).is_zero(); }

}  // namespace ltforge
