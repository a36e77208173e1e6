// Copyright 2026 The detpower Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DETPOWER_GOLDEN_HPP
#define DETPOWER_GOLDEN_HPP

#include <cmath>

namespace detpower {

struct ScalarMin {
    double x;
    double fx;
};

/// Golden-section minimization of a unimodal f on [lo, hi] until the bracket
/// is narrower than `xtol`. The endpoints are also evaluated so that a minimum
/// sitting on the boundary is returned exactly.
template <typename F>
ScalarMin golden_section_minimize(F &&f, double lo, double hi, double xtol = 1e-12, int max_iter = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > xtol; it++) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    ScalarMin best = fc <= fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
    const double flo = f(lo);
    if (flo < best.fx) {
        best = {lo, flo};
    }
    const double fhi = f(hi);
    if (fhi < best.fx) {
        best = {hi, fhi};
    }
    return best;
}

template <typename F>
ScalarMin golden_section_maximize(F &&f, double lo, double hi, double xtol = 1e-12, int max_iter = 200) {
    auto r = golden_section_minimize([&](double x) { return -f(x); }, lo, hi, xtol, max_iter);
    return {r.x, -r.fx};
}

}  // namespace detpower

#endif
