#pragma once

// 3-vector and unit-quaternion algebra. Quaternions are scalar-first
// [w, x, y, z] everywhere; Hamilton convention.

#include <algorithm>
#include <cmath>
#include <limits>

#include "omniteleop/error.hpp"

namespace omniteleop {

inline constexpr double kDirectionEpsilon = 1e-6; // meters

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend constexpr Vec3 operator*(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }
    friend constexpr Vec3 operator/(const Vec3& v, double s) { return {v.x / s, v.y / s, v.z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Elementwise product.
constexpr Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

/// Unit vector along v. Throws DegenerateDirection when |v| <= 1e-6.
inline Vec3 normalize(const Vec3& v) {
    const double n = norm(v);
    if (!(n > kDirectionEpsilon)) throw DegenerateDirection();
    return v / n;
}

/// Rotation as a unit quaternion. Construction always normalizes, so every
/// instance satisfies | |q| - 1 | <= 1e-9.
class UnitQuat {
public:
    constexpr UnitQuat() = default;

    /// Normalizes (w, x, y, z). Throws InvalidParameter for zero or non-finite input.
    static UnitQuat from_components(double w, double x, double y, double z) {
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        if (!std::isfinite(n) || n < 1e-12) throw InvalidParameter("quaternion has zero or non-finite norm");
        UnitQuat q;
        // Already unit to rounding: keep the bits so renormalization is idempotent.
        if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
            q.w_ = w;
            q.x_ = x;
            q.y_ = y;
            q.z_ = z;
            return q;
        }
        q.w_ = w / n;
        q.x_ = x / n;
        q.y_ = y / n;
        q.z_ = z / n;
        return q;
    }

    static UnitQuat from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 u = normalize(axis);
        const double s = std::sin(0.5 * angle);
        return from_components(std::cos(0.5 * angle), s * u.x, s * u.y, s * u.z);
    }

    static constexpr UnitQuat identity() { return {}; }

    [[nodiscard]] constexpr double w() const { return w_; }
    [[nodiscard]] constexpr double x() const { return x_; }
    [[nodiscard]] constexpr double y() const { return y_; }
    [[nodiscard]] constexpr double z() const { return z_; }
    [[nodiscard]] constexpr Vec3 vec() const { return {x_, y_, z_}; }
    [[nodiscard]] double norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

    /// Same rotation with w >= 0. Only used at serialization boundaries.
    [[nodiscard]] UnitQuat canonical() const { return w_ < 0.0 ? negated() : *this; }

    [[nodiscard]] constexpr UnitQuat negated() const {
        UnitQuat q;
        q.w_ = -w_;
        q.x_ = -x_;
        q.y_ = -y_;
        q.z_ = -z_;
        return q;
    }

    /// Rotates v by this quaternion.
    [[nodiscard]] Vec3 rotate(const Vec3& v) const {
        const Vec3 u = vec();
        const Vec3 t = 2.0 * cross(u, v);
        return v + w_ * t + cross(u, t);
    }

    friend constexpr bool operator==(const UnitQuat&, const UnitQuat&) = default;

private:
    double w_ = 1.0;
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;
};

struct Pose {
    Vec3 position;
    UnitQuat orientation;

    friend constexpr bool operator==(const Pose&, const Pose&) = default;
};

constexpr double quat_dot(const UnitQuat& a, const UnitQuat& b) {
    return a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

/// Hamilton product a ∘ b, renormalized.
inline UnitQuat quat_mul(const UnitQuat& a, const UnitQuat& b) {
    return UnitQuat::from_components(
        a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
        a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
        a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
        a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w());
}

inline UnitQuat quat_conj(const UnitQuat& q) { return UnitQuat::from_components(q.w(), -q.x(), -q.y(), -q.z()); }

/// Geodesic angle between two attitudes in [0, pi]; insensitive to q vs -q.
/// Equal to 2 acos(min(1, |a.b|)), evaluated through atan2 to keep precision
/// for small angles.
inline double quat_error_angle(const UnitQuat& a, const UnitQuat& b) {
    const double w = quat_dot(a, b);
    const Vec3 v{a.w() * b.x() - b.w() * a.x() - (a.y() * b.z() - a.z() * b.y()),
                 a.w() * b.y() - b.w() * a.y() - (a.z() * b.x() - a.x() * b.z()),
                 a.w() * b.z() - b.w() * a.z() - (a.x() * b.y() - a.y() * b.x())};
    return 2.0 * std::atan2(norm(v), std::abs(w));
}

/// Shortest-arc interpolation from a (t = 0) to b (t = 1).
inline UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double t) {
    if (t <= 0.0 || a == b) return a;
    if (t >= 1.0) return b;
    const UnitQuat target = quat_dot(a, b) < 0.0 ? b.negated() : b;
    // Relative rotation conj(a) ∘ target, left unnormalized; its w equals a.target >= 0.
    const double rw = quat_dot(a, target);
    const Vec3 rv{a.w() * target.x() - target.w() * a.x() - (a.y() * target.z() - a.z() * target.y()),
                  a.w() * target.y() - target.w() * a.y() - (a.z() * target.x() - a.x() * target.z()),
                  a.w() * target.z() - target.w() * a.z() - (a.x() * target.y() - a.y() * target.x())};
    const double vn = norm(rv);
    if (vn == 0.0) return a;
    const double half = std::atan2(vn, rw) * t;
    const double s = std::sin(half) / vn;
    const UnitQuat step = UnitQuat::from_components(std::cos(half), s * rv.x, s * rv.y, s * rv.z);
    return quat_mul(a, step);
}

} // namespace omniteleop
