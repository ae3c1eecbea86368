#pragma once

#include <vector>

namespace nlstiff {

// Two equal links joined by one rotational spring, passive at both ends and
// compressed along the line through them.
struct TwoLinkMechanism {
    double half_angle_init = 0.0;  // alpha: initial link inclination
    double spring_k = 1.0;
    double link_length = 1.0;

    void validate() const;
};

struct TwoLinkSample {
    double q = 0.0;
    double deflection = 0.0;  // Delta(q) = 2 L (cos a - cos(a + q))
    double force = 0.0;       // F(q) = 2 k q / (L sin(a + q))
    double potential = 0.0;   // V(q) = 2 k q^2 - 2 F L (cos a - cos(a + q))
};

// Parametric force-deflection-energy curve. Throws SingularSampleError when
// |sin(alpha + q)| <= 1e-12 |q| at a sample (or sin = 0 at q = 0).
std::vector<TwoLinkSample> twolink_curve(const TwoLinkMechanism& mech, const std::vector<double>& q_samples);

// 2k/L. Throws NotApplicableError unless alpha == 0 (within 1e-12).
double twolink_critical(const TwoLinkMechanism& mech);

}  // namespace nlstiff
