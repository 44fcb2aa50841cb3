#include "hobs/manifold.hpp"
#include "hobs/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace hobs;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_near(const Mat3& a, const Mat3& b, double tol)
{
    EXPECT_LE((a - b).norm(), tol) << "a=\n" << a << "\nb=\n" << b;
}

void expect_near(const Vec3& a, const Vec3& b, double tol)
{
    EXPECT_LE((a - b).norm(), tol) << "a=" << a.transpose() << " b=" << b.transpose();
}

}  // namespace

TEST(Hat, MatchesCrossProductLayout)
{
    Mat3 e3;
    e3 << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    EXPECT_EQ(hat(Vec3(0, 0, 1)), e3);
    EXPECT_EQ(hat(Vec3::Zero()), Mat3::Zero());
    Mat3 m;
    m << 0, -3, 2, 3, 0, -1, -2, 1, 0;
    EXPECT_EQ(hat(Vec3(1, 2, 3)), m);
}

TEST(Hat, ActsAsCrossProductAndIsAntisymmetric)
{
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = gaussian_vec3(rng);
        const Vec3 b = gaussian_vec3(rng);
        expect_near(hat(a) * b, a.cross(b), 1e-14);
        EXPECT_EQ(hat(a).transpose(), -hat(a));
        expect_near(hat(2.0 * a - b), 2.0 * hat(a) - hat(b), 1e-14);
    }
}

TEST(Vee, InvertsHat)
{
    Mat3 e3;
    e3 << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    EXPECT_EQ(vee(e3), Vec3(0, 0, 1));
    EXPECT_EQ(vee(Mat3::Zero()), Vec3::Zero());
    EXPECT_EQ(vee(hat(Vec3(1, 2, 3))), Vec3(1, 2, 3));
}

TEST(Vee, RejectsSymmetricPart)
{
    Mat3 a = hat(Vec3(1, 2, 3));
    a(0, 1) += 1e-6;
    EXPECT_THROW(vee(a), std::invalid_argument);
    // Within tolerance is accepted and returns the antisymmetric part.
    Mat3 b = hat(Vec3(1, 2, 3));
    b(0, 1) += 1e-12;
    expect_near(vee(b), Vec3(1, 2, 3), 1e-12);
}

TEST(GroupExp, Examples)
{
    EXPECT_EQ(group_exp(AlgebraElement(Vec3::Zero())).matrix(), Mat3::Identity());
    const GroupElement r = group_exp(AlgebraElement(0, 0, kPi / 2));
    expect_near(Vec3(r.matrix() * Vec3::UnitX()), Vec3(Vec3::UnitY()), 1e-15);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Vec3 w = gaussian_vec3(rng);
        expect_near((group_exp(AlgebraElement(w)) * group_exp(AlgebraElement(-w))).matrix(), Mat3::Identity(),
                    1e-12);
    }
}

TEST(GroupExp, AgreesWithAngleAxisOracle)
{
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        Vec3 w = gaussian_vec3(rng);
        if (i % 4 == 0) w *= 1e-5;  // Taylor branch
        const double angle = w.norm();
        const Mat3 ref = oracle::rotation(w, angle);
        expect_near(group_exp(AlgebraElement(w)).matrix(), ref, 1e-14);
    }
}

TEST(GroupExp, OneParameterSubgroup)
{
    const Vec3 w(0.3, -1.2, 0.8);
    for (double t : {0.1, 0.7, 2.5}) {
        for (double s : {-0.4, 0.9}) {
            expect_near(group_exp(AlgebraElement((t + s) * w)).matrix(),
                        (group_exp(AlgebraElement(t * w)) * group_exp(AlgebraElement(s * w))).matrix(), 1e-13);
        }
    }
}

TEST(GroupLog, InvertsExpIncludingNearPi)
{
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        Vec3 n = gaussian_vec3(rng).normalized();
        double angle = std::uniform_real_distribution<double>(0.0, kPi)(rng);
        if (i % 10 == 0) angle = kPi - 1e-6;
        if (i % 10 == 1) angle = 1e-7;
        const GroupElement r = group_exp(AlgebraElement(angle * n));
        expect_near(group_exp(group_log(r)).matrix(), r.matrix(), 1e-9);
    }
}

TEST(GroupElement, ValidatesInput)
{
    Mat3 m = Mat3::Identity();
    m(0, 0) = 1.1;
    EXPECT_THROW(GroupElement::from_matrix(m), std::invalid_argument);
    EXPECT_THROW(GroupElement::from_matrix(-Mat3::Identity()), std::invalid_argument);
    Mat3 nan = Mat3::Identity();
    nan(1, 1) = std::nan("");
    EXPECT_THROW(GroupElement::from_matrix(nan), std::invalid_argument);
    EXPECT_NO_THROW(GroupElement::from_matrix(rot_x(0.3).matrix()));
}

TEST(GroupElement, ProjectReturnsNearestRotation)
{
    const Mat3 r = rot_z(0.4).matrix() * rot_x(1.0).matrix();
    Mat3 noisy = r;
    noisy(0, 2) += 1e-4;
    const GroupElement p = GroupElement::project(noisy);
    EXPECT_LE(p.drift(), 1e-13);
    EXPECT_NEAR(p.matrix().determinant(), 1.0, 1e-13);
    // The polar factor of r + E is within O(|E|) of r.
    EXPECT_LE((p.matrix() - r).norm(), 2e-4);
    Eigen::JacobiSVD<Mat3> svd(noisy, Eigen::ComputeFullU | Eigen::ComputeFullV);
    expect_near(p.matrix(), svd.matrixU() * svd.matrixV().transpose(), 1e-12);
}

TEST(GroupElement, BoundedDriftOverMillionProducts)
{
    const GroupElement step = group_exp(AlgebraElement(1e-3, -2e-3, 0.5e-3));
    GroupElement x;
    double worst = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        x = x * step;
        worst = std::max(worst, x.drift());
    }
    EXPECT_LE(worst, 1e-9);
    EXPECT_NEAR(x.matrix().determinant(), 1.0, 1e-9);
}

TEST(OutputPoint, Normalization)
{
    EXPECT_THROW(OutputPoint::normalize(Vec3::Zero()), std::invalid_argument);
    EXPECT_THROW(OutputPoint::from_unit(Vec3(1.0, 0.1, 0.0)), std::invalid_argument);
    const OutputPoint p = OutputPoint::normalize(Vec3(3, 4, 0));
    EXPECT_NEAR(p.dir().norm(), 1.0, 1e-15);
    const Vec3 v = Vec3(1, 2, 3).normalized();
    EXPECT_EQ(OutputPoint::from_unit(v).dir(), v);
}

TEST(TangentVector, RejectsNormalComponent)
{
    EXPECT_THROW(TangentVector(OutputPoint::e3(), Vec3(1, 0, 1e-6)), std::invalid_argument);
    const TangentVector t(OutputPoint::e3(), Vec3(1, 0, 1e-12));
    EXPECT_LE(std::abs(t.vec().dot(Vec3::UnitZ())), 1e-15);
    const TangentVector p = TangentVector::project(OutputPoint::e3(), Vec3(1, 2, 3));
    EXPECT_EQ(p.vec(), Vec3(1, 2, 0));
}

TEST(Act, Examples)
{
    Rng rng(1);
    const OutputPoint y = random_output(rng);
    expect_near(act(GroupElement(), y).dir(), y.dir(), 1e-15);
    expect_near(act(rot_z(kPi / 2), OutputPoint::e1()).dir(), Vec3(0, -1, 0), 1e-15);
    expect_near(act(rot_x(kPi / 2), OutputPoint::e3()).dir(), Vec3(0, 1, 0), 1e-15);
}

TEST(Act, RightActionLaw)
{
    Rng rng(2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const GroupElement x = random_rotation(rng);
        const GroupElement y = random_rotation(rng);
        const OutputPoint p = random_output(rng);
        worst = std::max(worst, (act(x, act(y, p)).dir() - act(y * x, p).dir()).norm());
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Stabiliser, Examples)
{
    EXPECT_TRUE(in_stabiliser(GroupElement(), OutputPoint::e3()));
    EXPECT_TRUE(in_stabiliser(rot_z(0.7), OutputPoint::e3()));
    EXPECT_FALSE(in_stabiliser(rot_x(0.7), OutputPoint::e3()));
}

TEST(Stabiliser, ClosedUnderRightMultiplicationByStabiliser)
{
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const GroupElement x = i % 2 ? random_rotation(rng) : rot_z(0.1 * i);
        const GroupElement z = rot_z(std::uniform_real_distribution<double>(-kPi, kPi)(rng));
        EXPECT_EQ(in_stabiliser(x * z, OutputPoint::e3()), in_stabiliser(x, OutputPoint::e3()));
    }
}

TEST(Section, Examples)
{
    EXPECT_LE((section(OutputPoint::e3(), OutputPoint::e3()).matrix() - Mat3::Identity()).norm(), 1e-15);
    const GroupElement s = section(OutputPoint::e1(), OutputPoint::e3());
    expect_near(act(s, OutputPoint::e3()).dir(), Vec3::UnitX(), 1e-15);
    // Transpose of the rotation by pi/2 about e2.
    expect_near(s.matrix(), oracle::rotation(Vec3::UnitY(), kPi / 2).transpose(), 1e-15);
    EXPECT_THROW(section(OutputPoint::e3().antipode(), OutputPoint::e3()), DegenerateInput);
}

TEST(Section, ConsistentWithActAndMinimalAngle)
{
    Rng rng(4);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const OutputPoint y0 = random_output(rng);
        const OutputPoint y = random_output(rng);
        if ((y.dir() + y0.dir()).norm() < 1e-6) continue;
        const GroupElement s = section(y, y0);
        worst = std::max(worst, (act(s, y0).dir() - y.dir()).norm());
        // Rotation angle equals the angle between y0 and y.
        const double angle = group_log(s).vec().norm();
        EXPECT_NEAR(angle, std::acos(std::clamp(y.dir().dot(y0.dir()), -1.0, 1.0)), 1e-7);
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(RiemannianInner, ExamplesAndInvariance)
{
    const TangentVector v(OutputPoint::e3(), Vec3::UnitX());
    EXPECT_EQ(riemannian_inner(v, v), 1.0);
    EXPECT_THROW(riemannian_inner(v, TangentVector(OutputPoint::e1(), Vec3::UnitY())), std::invalid_argument);

    Rng rng(6);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const OutputPoint y = random_output(rng);
        const TangentVector a = random_tangent(rng, y);
        const TangentVector b = random_tangent(rng, y);
        const GroupElement s = random_rotation(rng);
        worst = std::max(worst, std::abs(riemannian_inner(act_tangent(s, a), act_tangent(s, b)) -
                                         riemannian_inner(a, b)));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(SphereExp, FollowsGreatCircle)
{
    const OutputPoint p = sphere_exp(TangentVector(OutputPoint::e1(), Vec3(0, kPi / 2, 0)));
    expect_near(p.dir(), Vec3::UnitY(), 1e-15);
    EXPECT_EQ(sphere_exp(TangentVector::zero(OutputPoint::e2())).dir(), Vec3::UnitY());
}

TEST(Random, HaarRotationsAreProperAndSpread)
{
    Rng rng(12);
    Vec3 mean = Vec3::Zero();
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const GroupElement r = random_rotation(rng);
        ASSERT_LE(r.drift(), 1e-12);
        ASSERT_GT(r.matrix().determinant(), 0.0);
        mean += act(r, OutputPoint::e3()).dir();
    }
    // Image of a fixed point under Haar rotations is uniform on S^2.
    EXPECT_LE((mean / n).norm(), 0.03);
}

TEST(Random, DeriveSeedSeparatesStreams)
{
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
}
