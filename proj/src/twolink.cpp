#include "nlstiff/twolink.hpp"

#include "nlstiff/errors.hpp"

#include <cmath>

namespace nlstiff {

namespace {
constexpr double kStraightTolerance = 1e-12;
constexpr double kSingularRatio = 1e-12;
}

void TwoLinkMechanism::validate() const {
    if (!std::isfinite(half_angle_init)) throw InvalidArgumentError("alpha must be finite");
    if (!(spring_k > 0.0) || !std::isfinite(spring_k)) throw InvalidArgumentError("spring stiffness must be positive");
    if (!(link_length > 0.0) || !std::isfinite(link_length)) throw InvalidArgumentError("link length must be positive");
}

std::vector<TwoLinkSample> twolink_curve(const TwoLinkMechanism& mech, const std::vector<double>& q_samples) {
    mech.validate();
    const double a = mech.half_angle_init;
    const double k = mech.spring_k;
    const double l = mech.link_length;
    std::vector<TwoLinkSample> out;
    out.reserve(q_samples.size());
    for (std::size_t i = 0; i < q_samples.size(); ++i) {
        const double q = q_samples[i];
        if (!std::isfinite(q)) throw InvalidArgumentError("non-finite q sample");
        const double s = std::sin(a + q);
        TwoLinkSample sample;
        sample.q = q;
        sample.deflection = 2.0 * l * (std::cos(a) - std::cos(a + q));
        // F = 2 k q / (L s) stays finite as q -> 0 only when s vanishes with q.
        const bool singular = q == 0.0 ? s == 0.0 : std::abs(s) <= kSingularRatio * std::abs(q);
        if (singular) {
            throw SingularSampleError("sin(alpha + q) vanishes; force undefined", i);
        }
        if (q == 0.0) {
            sample.force = 0.0;
        } else {
            sample.force = 2.0 * k * q / (l * s);
        }
        sample.potential = 2.0 * k * q * q - sample.force * sample.deflection;
        out.push_back(sample);
    }
    return out;
}

double twolink_critical(const TwoLinkMechanism& mech) {
    mech.validate();
    if (std::abs(mech.half_angle_init) > kStraightTolerance) {
        throw NotApplicableError(
            "critical force is defined only for the straight mechanism (alpha = 0); a non-straight "
            "mechanism deflects from zero load like a spring");
    }
    return 2.0 * mech.spring_k / mech.link_length;
}

}  // namespace nlstiff
