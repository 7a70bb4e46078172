/*
 * Copyright 2026 The DAPr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DAPR_STATS_HPP_
#define DAPR_STATS_HPP_

#include <span>
#include <vector>

namespace dapr {

double Mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double SampleStdDev(std::span<const double> values);
// SampleStdDev / sqrt(n).
double StandardError(std::span<const double> values);
// Ranks starting at 1; tied values share their average rank.
std::vector<double> AverageRanks(std::span<const double> values);
double PearsonCorrelation(std::span<const double> a, std::span<const double> b);
// Pearson correlation of average ranks.
double SpearmanCorrelation(std::span<const double> a, std::span<const double> b);

}  // namespace dapr

#endif  // DAPR_STATS_HPP_
