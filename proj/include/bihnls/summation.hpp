#ifndef BIHNLS_SUMMATION_HPP
#define BIHNLS_SUMMATION_HPP

// Compensated accumulation.  Grid reductions run over up to M^3 ~ 1e9 terms and
// several contracts below ask for 1e-12 relative agreement, which naive
// left-to-right summation cannot guarantee.  Neumaier's variant of Kahan
// summation keeps the error at a few ulps independent of length.

#include <cmath>
#include <cstddef>

namespace bihnls {

class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class It, class F>
double compensated_sum(It first, It last, F&& term) {
  KahanSum s;
  for (; first != last; ++first) s.add(term(*first));
  return s.value();
}

}  // namespace bihnls

#endif
