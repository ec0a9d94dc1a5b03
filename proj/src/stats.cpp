#include "andlab/stats.hpp"

#include <boost/math/distributions/beta.hpp>
#include <stdexcept>

namespace andlab {

BinomialInterval clopper_pearson(long long successes, long long trials, double confidence) {
    if (trials <= 0) throw std::invalid_argument("clopper_pearson: trials must be positive");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("clopper_pearson: successes outside [0, trials]");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("clopper_pearson: confidence outside (0,1)");
    const double alpha = 1.0 - confidence;
    const auto x = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    BinomialInterval ci;
    if (successes > 0)
        ci.lo = boost::math::quantile(boost::math::beta_distribution<double>(x, n - x + 1.0),
                                      0.5 * alpha);
    if (successes < trials)
        ci.hi = boost::math::quantile(boost::math::beta_distribution<double>(x + 1.0, n - x),
                                      1.0 - 0.5 * alpha);
    return ci;
}

}  // namespace andlab
