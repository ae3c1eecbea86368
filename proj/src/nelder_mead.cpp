#include "nlstiff/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace nlstiff {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Simplex {
    std::vector<Vector> vertices;
    std::vector<double> values;
    std::vector<int> order;

    void sort() {
        std::iota(order.begin(), order.end(), 0);
        // Stable so that equal (or infinite) values keep a deterministic order.
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return values[a] < values[b]; });
    }
};

class Evaluator {
public:
    Evaluator(const std::function<double(const Vector&)>& f, int budget) : f_(f), budget_(budget) {}

    double operator()(const Vector& x) {
        ++count_;
        const double v = f_(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    }
    bool exhausted() const { return count_ >= budget_; }
    int count() const { return count_; }

private:
    const std::function<double(const Vector&)>& f_;
    int budget_;
    int count_ = 0;
};

bool converged(const Simplex& s, const NelderMeadOptions& opt) {
    const int best = s.order.front();
    if (!std::isfinite(s.values[best])) return false;
    double dx = 0.0;
    double df = 0.0;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        dx = std::max(dx, (s.vertices[i] - s.vertices[best]).cwiseAbs().maxCoeff());
        df = std::max(df, std::abs(s.values[i] - s.values[best]));
    }
    return dx <= opt.x_tolerance && df <= opt.f_tolerance;
}

// One simplex descent from `start`; returns the best vertex found.
NelderMeadResult descend(Evaluator& eval, const Vector& start, double step, const NelderMeadOptions& opt) {
    const auto dim = start.size();
    Simplex s;
    s.vertices.reserve(static_cast<std::size_t>(dim + 1));
    s.vertices.push_back(start);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Vector v = start;
        v[i] += step;
        s.vertices.push_back(std::move(v));
    }
    s.values.resize(s.vertices.size());
    s.order.resize(s.vertices.size());
    for (std::size_t i = 0; i < s.vertices.size(); ++i) s.values[i] = eval(s.vertices[i]);

    bool done = false;
    while (!eval.exhausted()) {
        s.sort();
        if (converged(s, opt)) {
            done = true;
            break;
        }
        const int best = s.order.front();
        const int worst = s.order.back();
        const int second_worst = s.order[s.order.size() - 2];

        Vector centroid = Vector::Zero(dim);
        for (std::size_t i = 0; i + 1 < s.order.size(); ++i) centroid += s.vertices[s.order[i]];
        centroid /= static_cast<double>(dim);

        const Vector reflected = centroid + kReflect * (centroid - s.vertices[worst]);
        const double f_reflected = eval(reflected);

        if (f_reflected < s.values[best]) {
            const Vector expanded = centroid + kExpand * (reflected - centroid);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                s.vertices[worst] = expanded;
                s.values[worst] = f_expanded;
            } else {
                s.vertices[worst] = reflected;
                s.values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < s.values[second_worst]) {
            s.vertices[worst] = reflected;
            s.values[worst] = f_reflected;
            continue;
        }

        const bool outside = f_reflected < s.values[worst];
        const Vector contracted = outside ? Vector(centroid + kContract * (reflected - centroid))
                                          : Vector(centroid + kContract * (s.vertices[worst] - centroid));
        const double f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : s.values[worst])) {
            s.vertices[worst] = contracted;
            s.values[worst] = f_contracted;
            continue;
        }

        for (std::size_t i = 0; i < s.vertices.size(); ++i) {
            if (static_cast<int>(i) == best) continue;
            s.vertices[i] = s.vertices[best] + kShrink * (s.vertices[i] - s.vertices[best]);
            s.values[i] = eval(s.vertices[i]);
        }
    }
    s.sort();
    NelderMeadResult out;
    out.x = s.vertices[s.order.front()];
    out.value = s.values[s.order.front()];
    out.converged = done;
    return out;
}

}  // namespace

NelderMeadResult minimize_nelder_mead(const std::function<double(const Vector&)>& objective,
                                      const Vector& start, const NelderMeadOptions& options) {
    Evaluator eval(objective, options.max_evaluations);
    if (start.size() == 0) {
        NelderMeadResult out;
        out.x = start;
        out.value = eval(start);
        out.evaluations = eval.count();
        out.converged = true;
        return out;
    }

    NelderMeadResult best = descend(eval, start, options.initial_step, options);
    // Re-seed a fresh simplex at the optimum until it stops moving; a collapsed
    // simplex can otherwise stall on a slope.
    for (int restart = 0; restart < 3 && best.converged && !eval.exhausted(); ++restart) {
        const double step = std::max(100.0 * options.x_tolerance, 1e-3 * options.initial_step);
        NelderMeadResult again = descend(eval, best.x, step, options);
        const bool moved = (again.x - best.x).cwiseAbs().maxCoeff() > options.x_tolerance;
        const bool improved = again.value < best.value;
        if (improved) best = again;
        if (!moved || !improved) break;
    }
    best.evaluations = eval.count();
    return best;
}

}  // namespace nlstiff
