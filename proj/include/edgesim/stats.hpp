#pragma once

#include <vector>

namespace edgesim {

double mean(const std::vector<double>& xs);

// Standard error of the mean (sample stddev / sqrt(n)); 0 for n < 2.
double standard_error(const std::vector<double>& xs);

// Rank correlation with average ranks for ties; NaN for n < 2 or a constant
// sequence.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace edgesim
