#pragma once

namespace andlab {

/// Exact (Clopper-Pearson) two-sided binomial confidence interval.
struct BinomialInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// `confidence` is the two-sided level, e.g. 0.99; endpoints come from the
/// beta-quantile form, with the conventional closures at 0 and n successes.
BinomialInterval clopper_pearson(long long successes, long long trials, double confidence);

}  // namespace andlab
