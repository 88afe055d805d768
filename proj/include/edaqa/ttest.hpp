#pragma once

#include "edaqa/signal.hpp"

namespace edaqa {

struct WelchResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

/// Two-sample Welch t-test (unequal variances), two-sided p from the
/// regularised incomplete beta function. Both samples constant and equal
/// gives t = 0, p = 1; constant but different gives t = +-inf, p = 0.
WelchResult welch_t_test(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b);

}  // namespace edaqa
