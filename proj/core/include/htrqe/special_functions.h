// special_functions.h
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
//
// Distribution tails needed for significance tests.

#ifndef HTRQE_SPECIAL_FUNCTIONS_H_
#define HTRQE_SPECIAL_FUNCTIONS_H_

namespace htrqe {

// I_x(a, b) for a, b > 0 and 0 <= x <= 1, evaluated with the continued
// fraction on whichever side of the mean converges faster.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T > t) for Student's t with `df` degrees of freedom.
double StudentTSurvival(double t, double df);

// P(F > f) for the F distribution with (d1, d2) degrees of freedom.
double FSurvival(double f, double d1, double d2);

}  // namespace htrqe

#endif  // HTRQE_SPECIAL_FUNCTIONS_H_
