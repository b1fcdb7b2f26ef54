#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vins {

double mean(std::span<const double> xs);

/// Population standard deviation (divides by n).
double stddev(std::span<const double> xs);

double pearson(std::span<const double> xs, std::span<const double> ys);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Rank transform used by spearman(); ties receive their average rank.
std::vector<double> average_ranks(std::span<const double> xs);

}  // namespace vins
