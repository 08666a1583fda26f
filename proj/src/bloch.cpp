// SPDX-License-Identifier: Apache-2.0
#include "qpure/bloch.hpp"

#include <cmath>
#include <string>

namespace qpure {

void BlochVector::clamp_to_ball() {
    const double rr = r();
    if (rr <= 1.0) return;
    if (rr > 1.0 + kRadialSlack) {
        throw overshoot_error("BlochVector radius " + std::to_string(rr) +
                              " exceeds 1 beyond the allowed slack");
    }
    x /= rr;
    y /= rr;
    z /= rr;
}

void validate(const BlochVector& v) {
    if (!v.valid()) {
        throw domain_error("invalid Bloch vector: r = " + std::to_string(v.r()));
    }
}

double purity(const BlochVector& v) {
    validate(v);
    return 0.5 * (1.0 + v.r2());
}

namespace {
double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace

double von_neumann_entropy(const BlochVector& v) {
    validate(v);
    const double r = std::min(v.r(), 1.0);
    const double lp = 0.5 * (1.0 + r);
    const double lm = 0.5 * (1.0 - r);
    return -xlnx(lp) - xlnx(lm);
}

PurityState PurityState::from_purity(double p) {
    if (!(p >= 0.5 && p <= 1.0 + kRadialSlack)) {
        throw domain_error("purity outside [1/2, 1]: " + std::to_string(p));
    }
    return {std::min(p, 1.0), std::max(1.0 - p, 0.0)};
}

PurityState PurityState::from_linear_entropy(double s) {
    if (!(s >= 0.0 && s <= 0.5)) {
        throw domain_error("linear entropy outside [0, 1/2]: " + std::to_string(s));
    }
    return {1.0 - s, s};
}

Rotation Rotation::from_axis_angle(const std::array<double, 3>& axis, double angle) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n <= 0.0 || !std::isfinite(n)) throw domain_error("rotation axis must be nonzero");
    const double s = std::sin(0.5 * angle) / n;
    Rotation rot;
    rot.w_ = std::cos(0.5 * angle);
    rot.qx_ = axis[0] * s;
    rot.qy_ = axis[1] * s;
    rot.qz_ = axis[2] * s;
    rot.normalize();
    return rot;
}

void Rotation::normalize() {
    const double n = std::sqrt(w_ * w_ + qx_ * qx_ + qy_ * qy_ + qz_ * qz_);
    w_ /= n;
    qx_ /= n;
    qy_ /= n;
    qz_ /= n;
}

BlochVector Rotation::apply(const BlochVector& v) const {
    // v' = v + 2 q x (q x v + w v), q = (qx,qy,qz)
    const double cx1 = qy_ * v.z - qz_ * v.y + w_ * v.x;
    const double cy1 = qz_ * v.x - qx_ * v.z + w_ * v.y;
    const double cz1 = qx_ * v.y - qy_ * v.x + w_ * v.z;
    return {v.x + 2.0 * (qy_ * cz1 - qz_ * cy1),
            v.y + 2.0 * (qz_ * cx1 - qx_ * cz1),
            v.z + 2.0 * (qx_ * cy1 - qy_ * cx1)};
}

Rotation Rotation::then(const Rotation& next) const {
    // quaternion product next * this
    Rotation out;
    out.w_ = next.w_ * w_ - next.qx_ * qx_ - next.qy_ * qy_ - next.qz_ * qz_;
    out.qx_ = next.w_ * qx_ + next.qx_ * w_ + next.qy_ * qz_ - next.qz_ * qy_;
    out.qy_ = next.w_ * qy_ - next.qx_ * qz_ + next.qy_ * w_ + next.qz_ * qx_;
    out.qz_ = next.w_ * qz_ + next.qx_ * qy_ - next.qy_ * qx_ + next.qz_ * w_;
    out.normalize();
    return out;
}

Rotation Rotation::inverse() const {
    Rotation out = *this;
    out.qx_ = -out.qx_;
    out.qy_ = -out.qy_;
    out.qz_ = -out.qz_;
    return out;
}

bool Rotation::is_identity(double tol) const {
    return std::abs(std::abs(w_) - 1.0) <= tol;
}

namespace {
std::array<double, 3> unit_or_throw(const std::array<double, 3>& a) {
    const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    if (!(n > 0.0) || !std::isfinite(n)) throw domain_error("axis must be a nonzero vector");
    return {a[0] / n, a[1] / n, a[2] / n};
}

std::array<double, 3> any_orthogonal(const std::array<double, 3>& t) {
    // cross with the least-aligned coordinate axis
    const double ax = std::abs(t[0]), ay = std::abs(t[1]), az = std::abs(t[2]);
    std::array<double, 3> e{};
    if (ax <= ay && ax <= az)
        e = {1.0, 0.0, 0.0};
    else if (ay <= az)
        e = {0.0, 1.0, 0.0};
    else
        e = {0.0, 0.0, 1.0};
    return {t[1] * e[2] - t[2] * e[1], t[2] * e[0] - t[0] * e[2], t[0] * e[1] - t[1] * e[0]};
}
}  // namespace

Rotation align_rotation(const BlochVector& v, const std::array<double, 3>& target_axis) {
    validate(v);
    const double r = v.r();
    if (r <= 0.0) {
        throw domain_error("align_rotation: direction degenerate at r = 0");
    }
    const auto t = unit_or_throw(target_axis);
    const std::array<double, 3> u = {v.x / r, v.y / r, v.z / r};
    const std::array<double, 3> c = {u[1] * t[2] - u[2] * t[1], u[2] * t[0] - u[0] * t[2],
                                     u[0] * t[1] - u[1] * t[0]};
    const double sin_a = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    const double cos_a = u[0] * t[0] + u[1] * t[1] + u[2] * t[2];
    if (sin_a < 1e-15) {
        if (cos_a > 0.0) return Rotation::identity();
        // anti-parallel: half-turn about any axis orthogonal to the target
        return Rotation::from_axis_angle(any_orthogonal(t), M_PI);
    }
    return Rotation::from_axis_angle(c, std::atan2(sin_a, cos_a));
}

Rotation perp_rotation(const BlochVector& v, const std::array<double, 3>& axis) {
    validate(v);
    const double r = v.r();
    if (r <= 0.0) {
        throw domain_error("perp_rotation: direction degenerate at r = 0");
    }
    const auto n = unit_or_throw(axis);
    const double va = v.x * n[0] + v.y * n[1] + v.z * n[2];
    // in-plane component of v
    std::array<double, 3> ip = {v.x - va * n[0], v.y - va * n[1], v.z - va * n[2]};
    const double ipn = std::sqrt(ip[0] * ip[0] + ip[1] * ip[1] + ip[2] * ip[2]);
    std::array<double, 3> target{};
    if (ipn < 1e-15 * r) {
        target = any_orthogonal(n);  // v along the axis: pick a fixed equatorial direction
    } else {
        target = {ip[0] / ipn, ip[1] / ipn, ip[2] / ipn};
    }
    return align_rotation(v, target);
}

}  // namespace qpure
