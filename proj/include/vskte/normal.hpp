#pragma once

namespace vskte {

double normal_cdf(double z);
double normal_upper_tail(double z);
double normal_quantile(double p);

}  // namespace vskte
