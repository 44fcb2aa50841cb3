// manifold.hpp
//
// SO(3) acting on the unit sphere S^2 from the right, h(X, y) = X^T y.
// Small fixed-size primitives only: hat/vee, exponential and logarithm,
// the action, stabiliser membership, a section of the orbit map and the
// embedded metric on T S^2.
//
// All values are immutable; every function here is pure.

#ifndef HOBS_MANIFOLD_HPP
#define HOBS_MANIFOLD_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hobs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Tolerance for group membership and stabiliser tests.
inline constexpr double kGroupTolerance = 1e-9;
/// Drift above which a composed rotation is projected back onto SO(3).
inline constexpr double kReorthonormalizeThreshold = 1e-12;

/// Raised where a geometric construction is singular (e.g. the section at
/// the antipode of the reference direction).
class DegenerateInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline Mat3 hat(const Vec3& w)
{
    Mat3 m;
    m << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
         -w.y(), w.x(), 0.0;
    return m;
}

/// Inverse of hat. Rejects matrices whose symmetric part exceeds 1e-9 in
/// Frobenius norm; otherwise returns the axial vector of the antisymmetric
/// part.
inline Vec3 vee(const Mat3& a)
{
    if ((a + a.transpose()).norm() > kGroupTolerance) {
        throw std::invalid_argument("vee: matrix is not antisymmetric");
    }
    const Mat3 s = 0.5 * (a - a.transpose());
    return {s(2, 1), s(0, 2), s(1, 0)};
}

/// Antisymmetric projection P(A) = (A - A^T)/2.
inline Mat3 skew_part(const Mat3& a) { return 0.5 * (a - a.transpose()); }

inline double orthogonality_drift(const Mat3& m)
{
    return (m.transpose() * m - Mat3::Identity()).norm();
}

/// Nearest rotation in Frobenius norm (polar factor). Close to the group
/// the Newton-Schulz iteration X <- X (3I - X^T X)/2 converges
/// quadratically to the polar factor; far from it an SVD is used.
inline Mat3 nearest_rotation(const Mat3& m)
{
    double drift = orthogonality_drift(m);
    if (drift < 1e-3 && m.determinant() > 0.0) {
        Mat3 x = m;
        for (int i = 0; i < 6 && drift > 1e-15; ++i) {
            x = 0.5 * x * (3.0 * Mat3::Identity() - x.transpose() * x);
            drift = orthogonality_drift(x);
        }
        return x;
    }
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) = -u.col(2);
    }
    return u * v.transpose();
}

/// Element of so(3), stored as its axial vector (rad/s for velocities).
class AlgebraElement {
public:
    AlgebraElement() : v_(Vec3::Zero()) {}
    explicit AlgebraElement(const Vec3& v) : v_(v) {}
    AlgebraElement(double x, double y, double z) : v_(x, y, z) {}

    const Vec3& vec() const { return v_; }
    Mat3 matrix() const { return hat(v_); }

    friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b)
    {
        return AlgebraElement(a.v_ + b.v_);
    }
    friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b)
    {
        return AlgebraElement(a.v_ - b.v_);
    }
    friend AlgebraElement operator*(double s, const AlgebraElement& a)
    {
        return AlgebraElement(s * a.v_);
    }

private:
    Vec3 v_;
};

/// Rotation matrix in SO(3).
class GroupElement {
public:
    GroupElement() : m_(Mat3::Identity()) {}

    /// Accepts a matrix within 1e-9 of SO(3); projects it exactly onto the
    /// group when its drift exceeds the re-orthonormalization threshold.
    static GroupElement from_matrix(const Mat3& m)
    {
        if (!m.allFinite()) {
            throw std::invalid_argument("GroupElement: non-finite matrix");
        }
        if (orthogonality_drift(m) > kGroupTolerance ||
            std::abs(m.determinant() - 1.0) > kGroupTolerance) {
            throw std::invalid_argument("GroupElement: matrix is not in SO(3)");
        }
        return GroupElement(m);
    }

    /// Projects an arbitrary non-singular matrix onto SO(3).
    static GroupElement project(const Mat3& m)
    {
        if (!m.allFinite()) {
            throw std::invalid_argument("GroupElement: non-finite matrix");
        }
        return GroupElement(nearest_rotation(m), Raw{});
    }

    /// Keeps m unless its drift exceeds 1e-12, in which case it is
    /// replaced by the nearest rotation.
    static GroupElement orthonormalized(const Mat3& m) { return GroupElement(m); }

    /// Wraps m without any check. For integrator stage values and other
    /// matrices the caller already knows to be rotations.
    static GroupElement unchecked(const Mat3& m) { return GroupElement(m, Raw{}); }

    static GroupElement identity() { return GroupElement(); }

    const Mat3& matrix() const { return m_; }
    double drift() const { return orthogonality_drift(m_); }

    GroupElement inverse() const { return GroupElement(m_.transpose(), Raw{}); }

    friend GroupElement operator*(const GroupElement& a, const GroupElement& b)
    {
        return GroupElement(a.m_ * b.m_);
    }

private:
    struct Raw {};
    GroupElement(const Mat3& m, Raw) : m_(m) {}
    explicit GroupElement(const Mat3& m)
        : m_(orthogonality_drift(m) > kReorthonormalizeThreshold ? nearest_rotation(m) : m)
    {
    }

    Mat3 m_;
};

/// Point on S^2.
class OutputPoint {
public:
    OutputPoint() : d_(Vec3::UnitZ()) {}

    /// Normalizes any non-zero vector.
    static OutputPoint normalize(const Vec3& v)
    {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw std::invalid_argument("OutputPoint: cannot normalize zero or non-finite vector");
        }
        return OutputPoint(v / n);
    }

    /// Requires | |v| - 1 | <= tol, then renormalizes.
    static OutputPoint from_unit(const Vec3& v, double tol = kGroupTolerance)
    {
        if (!v.allFinite() || std::abs(v.norm() - 1.0) > tol) {
            throw std::invalid_argument("OutputPoint: vector is not unit norm");
        }
        const double n = v.norm();
        return OutputPoint(std::abs(n - 1.0) <= 1e-15 ? v : Vec3(v / n));
    }

    static OutputPoint e1() { return OutputPoint(Vec3::UnitX()); }
    static OutputPoint e2() { return OutputPoint(Vec3::UnitY()); }
    static OutputPoint e3() { return OutputPoint(Vec3::UnitZ()); }

    const Vec3& dir() const { return d_; }

    OutputPoint antipode() const { return OutputPoint(-d_); }

private:
    explicit OutputPoint(const Vec3& d) : d_(d) {}
    Vec3 d_;
};

/// Vector in T_base S^2, stored in the ambient R^3.
class TangentVector {
public:
    /// Checks tangency to 1e-9 relative to max(1, |v|) and removes the
    /// residual normal component.
    TangentVector(const OutputPoint& base, const Vec3& v) : base_(base)
    {
        const double normal = v.dot(base.dir());
        if (!v.allFinite() || std::abs(normal) > kGroupTolerance * std::max(1.0, v.norm())) {
            throw std::invalid_argument("TangentVector: vector is not tangent at base point");
        }
        v_ = v - normal * base.dir();
    }

    /// Orthogonal projection of an ambient vector onto T_base S^2.
    static TangentVector project(const OutputPoint& base, const Vec3& v)
    {
        return TangentVector(base, v - v.dot(base.dir()) * base.dir());
    }

    static TangentVector zero(const OutputPoint& base) { return TangentVector(base, Vec3::Zero()); }

    const OutputPoint& base() const { return base_; }
    const Vec3& vec() const { return v_; }

private:
    OutputPoint base_;
    Vec3 v_;
};

// ---------------------------------------------------------------------------
// Exponential and logarithm.

/// Rodrigues formula; Taylor coefficients below |w| = 1e-4.
inline GroupElement group_exp(const AlgebraElement& omega)
{
    const Vec3& w = omega.vec();
    const double theta2 = w.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a;  // sin(t)/t
    double b;  // (1 - cos(t))/t^2
    if (theta < 1e-4) {
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    const Mat3 k = hat(w);
    return GroupElement::orthonormalized(Mat3::Identity() + a * k + b * k * k);
}

/// Principal logarithm, rotation angle in [0, pi].
inline AlgebraElement group_log(const GroupElement& x)
{
    const Mat3& r = x.matrix();
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const Vec3 axial(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));  // 2 sin(t) n
    const double theta = std::atan2(0.5 * axial.norm(), c);
    if (theta < 1e-4) {
        return AlgebraElement(0.5 * (1.0 + theta * theta / 6.0) * axial);
    }
    if (std::numbers::pi - theta < 1e-4) {
        // Near pi the antisymmetric part vanishes; recover n n^T from the
        // symmetric part, (R + R^T)/2 = cos(t) I + (1 - cos(t)) n n^T.
        const Mat3 s = (0.5 * (r + r.transpose()) - c * Mat3::Identity()) / (1.0 - c);
        Eigen::Index i;
        s.diagonal().maxCoeff(&i);
        Vec3 n = s.col(i) / std::sqrt(std::max(s(i, i), 1e-300));
        n.normalize();
        if (n.dot(axial) < 0.0) {
            n = -n;
        }
        return AlgebraElement(theta * n);
    }
    return AlgebraElement(theta / (2.0 * std::sin(theta)) * axial);
}

// Elementary rotations (active, right-handed).
inline GroupElement rot_x(double a) { return group_exp(AlgebraElement(a, 0.0, 0.0)); }
inline GroupElement rot_y(double a) { return group_exp(AlgebraElement(0.0, a, 0.0)); }
inline GroupElement rot_z(double a) { return group_exp(AlgebraElement(0.0, 0.0, a)); }

// ---------------------------------------------------------------------------
// Action, stabiliser, section.

/// Right action h(X, y) = X^T y.
inline OutputPoint act(const GroupElement& x, const OutputPoint& y)
{
    return OutputPoint::normalize(x.matrix().transpose() * y.dir());
}

inline bool in_stabiliser(const GroupElement& x, const OutputPoint& y0)
{
    return (act(x, y0).dir() - y0.dir()).norm() <= kGroupTolerance;
}

/// Minimal-angle rotation X with act(X, y0) = y.
///
/// Throws DegenerateInput when y is within 1e-9 of -y0, where the rotation
/// axis is undefined.
inline GroupElement section(const OutputPoint& y, const OutputPoint& y0)
{
    if ((y.dir() + y0.dir()).norm() <= kGroupTolerance) {
        throw DegenerateInput("section: output is antipodal to the reference direction");
    }
    // Q maps y0 onto y along the great circle; act(Q^T, y0) = Q y0 = y.
    const Vec3 c = y0.dir().cross(y.dir());
    const double d = y0.dir().dot(y.dir());
    const Mat3 k = hat(c);
    const Mat3 q = Mat3::Identity() + k + k * k / (1.0 + d);
    return GroupElement::orthonormalized(q.transpose());
}

/// Embedded Euclidean metric on T_y S^2. Invariant under the action.
inline double riemannian_inner(const TangentVector& v, const TangentVector& w)
{
    if ((v.base().dir() - w.base().dir()).norm() > 1e-12) {
        throw std::invalid_argument("riemannian_inner: tangent vectors have different base points");
    }
    return v.vec().dot(w.vec());
}

/// Pushforward of a tangent vector by the action of S: v -> S^T v.
inline TangentVector act_tangent(const GroupElement& s, const TangentVector& v)
{
    return TangentVector::project(act(s, v.base()), s.matrix().transpose() * v.vec());
}

/// Geodesic exponential on S^2: follows the great circle through y with
/// initial velocity v for unit time.
inline OutputPoint sphere_exp(const TangentVector& v)
{
    const double n = v.vec().norm();
    if (n == 0.0) {
        return v.base();
    }
    return OutputPoint::normalize(std::cos(n) * v.base().dir() + std::sin(n) / n * v.vec());
}

}  // namespace hobs

#endif  // HOBS_MANIFOLD_HPP
