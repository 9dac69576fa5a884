#include "brw/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include "brw/errors.hpp"

namespace brw {

double normal_two_sided_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 1.0 - alpha / 2.0);
}

}  // namespace brw
