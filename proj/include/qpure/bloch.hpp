// SPDX-License-Identifier: Apache-2.0
//
// Bloch-sphere state representation, purity/entropy functionals and rotations.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "qpure/errors.hpp"

namespace qpure {

// Radial slack: Ito steps may overshoot the sphere by rounding; overshoots in
// (1, 1+kRadialSlack] are renormalized to r=1, anything larger is an error.
inline constexpr double kRadialSlack = 1e-9;

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    [[nodiscard]] double r2() const { return x * x + y * y + z * z; }
    [[nodiscard]] double r() const { return std::sqrt(r2()); }
    [[nodiscard]] double theta() const { return std::atan2(std::hypot(x, y), z); }
    [[nodiscard]] double phi() const { return std::atan2(y, x); }

    [[nodiscard]] bool valid() const { return std::isfinite(r2()) && r() <= 1.0 + kRadialSlack; }

    // Renormalizes an in-slack overshoot onto the sphere; throws beyond the slack.
    void clamp_to_ball();
};

void validate(const BlochVector& v);

[[nodiscard]] double purity(const BlochVector& v);

// Von Neumann entropy in nats; r=1 limit is 0 by continuity.
[[nodiscard]] double von_neumann_entropy(const BlochVector& v);

// Purity, linear entropy and its logarithm as one value type. p + s == 1 exactly
// (s is the stored primary in the high-purity regime).
struct PurityState {
    double p;
    double s;

    static PurityState from_purity(double p);
    static PurityState from_linear_entropy(double s);

    [[nodiscard]] double log_s() const {
        if (s <= 0.0) throw domain_error("PurityState: log entropy undefined at s=0");
        return std::log(s);
    }
};

// Proper rotation of the Bloch ball, stored as a unit quaternion so composition
// stays orthogonal under chaining.
class Rotation {
  public:
    Rotation() = default;  // identity

    static Rotation from_axis_angle(const std::array<double, 3>& axis, double angle);
    static Rotation identity() { return {}; }

    [[nodiscard]] BlochVector apply(const BlochVector& v) const;
    [[nodiscard]] Rotation then(const Rotation& next) const;  // apply this, then next
    [[nodiscard]] Rotation inverse() const;

    [[nodiscard]] double angle() const { return 2.0 * std::acos(std::clamp(w_, -1.0, 1.0)); }
    [[nodiscard]] bool is_identity(double tol = 1e-14) const;

  private:
    // unit quaternion (w, xyz)
    double w_ = 1.0;
    double qx_ = 0.0, qy_ = 0.0, qz_ = 0.0;
    void normalize();
};

// Rotation taking v parallel to target_axis (unit vector). Throws at r=0 where
// the direction is degenerate; protocol drivers substitute the identity there.
[[nodiscard]] Rotation align_rotation(const BlochVector& v, const std::array<double, 3>& target_axis);

// Rotation taking v into the plane orthogonal to axis, along the minimal arc.
// v parallel to axis maps to a fixed in-plane direction.
[[nodiscard]] Rotation perp_rotation(const BlochVector& v, const std::array<double, 3>& axis);

}  // namespace qpure
