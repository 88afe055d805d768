#include "edaqa/ttest.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>

namespace edaqa {

WelchResult welch_t_test(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) {
  if (a.size() < 2 || b.size() < 2) throw RejectedInput("welch_t_test: each sample needs at least 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = a.mean();
  const double mb = b.mean();
  const double va = (a.array() - ma).square().sum() / (na - 1.0);
  const double vb = (b.array() - mb).square().sum() / (nb - 1.0);
  const double sa = va / na;
  const double sb = vb / nb;
  WelchResult r;
  if (sa + sb <= 0.0) {
    if (ma == mb) return r;
    r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.df = na + nb - 2.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
  const double x = r.df / (r.df + r.t * r.t);
  r.p = x >= 1.0 ? 1.0 : boost::math::ibeta(r.df / 2.0, 0.5, x);
  return r;
}

}  // namespace edaqa
