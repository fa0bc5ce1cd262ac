#pragma once

// Independent derivative oracle for the jet pipeline: tensor-product central
// difference stencils with two levels of Richardson extrapolation. Base step
// grows with the derivative order to keep roundoff below the truncation
// gain.

#include <cmath>
#include <functional>
#include <vector>

namespace fdcheck {

using Fn = std::function<double(const std::vector<double>&)>;

struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights; // to be divided by h^order
};

inline Stencil central_stencil(int order) {
    switch (order) {
    case 0: return {{0}, {1.0}};
    case 1: return {{-1, 1}, {-0.5, 0.5}};
    case 2: return {{-1, 0, 1}, {1.0, -2.0, 1.0}};
    case 3: return {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
    case 4: return {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}};
    default: return {};
    }
}

inline double product_stencil(const Fn& f, const std::vector<double>& x0,
                              const std::vector<int>& mu, double h) {
    const int m = static_cast<int>(mu.size());
    std::vector<Stencil> st(m);
    int total = 0;
    for (int i = 0; i < m; ++i) {
        st[i] = central_stencil(mu[i]);
        total += mu[i];
    }
    std::vector<size_t> pos(m, 0);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        std::vector<double> x = x0;
        for (int i = 0; i < m; ++i) {
            w *= st[i].weights[pos[i]];
            x[i] += st[i].offsets[pos[i]] * h;
        }
        acc += w * f(x);
        int i = 0;
        for (; i < m; ++i) {
            if (++pos[i] < st[i].offsets.size()) break;
            pos[i] = 0;
        }
        if (i == m) break;
    }
    return acc / std::pow(h, total);
}

// Partial derivative d^mu f at x0, Richardson-extrapolated over h, h/2, h/4.
inline double partial(const Fn& f, const std::vector<double>& x0, const std::vector<int>& mu) {
    int total = 0;
    for (int e : mu) total += e;
    if (total == 0) return f(x0);
    static const double base[5] = {0.0, 1e-3, 1e-3, 1e-2, 4e-2};
    const double h = base[total];
    double t0 = product_stencil(f, x0, mu, h);
    double t1 = product_stencil(f, x0, mu, h / 2);
    double t2 = product_stencil(f, x0, mu, h / 4);
    double r0 = (4.0 * t1 - t0) / 3.0;
    double r1 = (4.0 * t2 - t1) / 3.0;
    return (16.0 * r1 - r0) / 15.0;
}

} // namespace fdcheck
