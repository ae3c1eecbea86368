#pragma once

#include "nlstiff/chain_model.hpp"

#include <functional>
#include <initializer_list>
#include <numbers>
#include <random>

namespace nlstiff::testing {

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

// Unloaded four-link shapes with end-point (3.8, 0).
inline Vector u_shape() { return vec({-0.3179, 0.0558, 0.3804, 0.3524}); }
inline Vector z_shape() { return vec({-0.2417, 0.6821, -0.7958, 0.5170}); }

// Three-link shape with distal angles (-pi/4, -pi/3).
inline Vector three_link_u() { return vec({0.0, -std::numbers::pi / 4.0, -std::numbers::pi / 3.0}); }

// Four-link primary mode direction to four decimals (angle part).
inline Vector reference_mode_1() { return vec({0.5185, -0.0902, -0.6156, -0.5721}); }

inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vector a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

inline ChainModel random_chain(std::mt19937_64& rng, int n, double k_min = 0.0) {
    std::uniform_real_distribution<double> len(0.1, 10.0);
    std::uniform_real_distribution<double> stiff(k_min, 10.0);
    std::vector<double> l(static_cast<std::size_t>(n)), k(static_cast<std::size_t>(n));
    for (auto& x : l) x = len(rng);
    for (auto& x : k) x = stiff(rng);
    return ChainModel(l, k);
}

}  // namespace nlstiff::testing
