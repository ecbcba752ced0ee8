// Copyright 2026 The mlsumeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MLSUMEVAL_SPECIAL_HPP_
#define MLSUMEVAL_SPECIAL_HPP_

namespace mlsumeval::special {

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated to
/// relative accuracy ~1e-15. Requires a, b > 0 and 0 <= x <= 1.
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

/// Standard normal CDF.
double normal_cdf(double z);

/// Inverse of the standard normal CDF for 0 < p < 1 (rational start,
/// refined by Halley steps on erfc; absolute error well below 1e-12).
double normal_quantile(double p);

}  // namespace mlsumeval::special

#endif  // MLSUMEVAL_SPECIAL_HPP_
