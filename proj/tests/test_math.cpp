#include <catch2/catch_amalgamated.hpp>

#include "amsim/allocation.hpp"
#include "amsim/math.hpp"
#include "oracles.hpp"

using namespace amsim;

TEST_CASE("skew basics") {
    CHECK(skew(Vec3::zero()).max_abs() == 0.0);

    const Mat3 s = skew({1, 0, 0});
    const Mat3 expect = Mat3::from_rows({0, 0, 0}, {0, 0, -1}, {0, 1, 0});
    CHECK((s - expect).max_abs() == 0.0);

    oracles::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v = rng.vec3(-10, 10);
        const Vec3 w = rng.vec3(-10, 10);
        const Vec3 err = skew(v) * w - v.cross(w);
        CHECK(err.norm() < 1e-12);
        CHECK((skew(v) + skew(v).transpose()).max_abs() == 0.0);
    }
}

TEST_CASE("vee inverts skew") {
    CHECK(vee(Mat3::zero()).norm() == 0.0);

    const Vec3 v{1, 2, 3};
    const Vec3 back = vee(skew(v));
    CHECK((back - v).norm() == 0.0);

    const Vec3 u{0.3, -1.2, 7.0};
    CHECK((vee(skew(u)) - u).norm() == 0.0);

    oracles::Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        const Vec3 x = rng.vec3(-100, 100);
        CHECK((vee(skew(x)) - x).norm() == 0.0);
    }

    CHECK_THROWS_MATCHES(vee(Mat3::identity()), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::NotSkewSymmetric;
                         }));
}

TEST_CASE("rotation matrices stay in SO(3)") {
    oracles::Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        const Vec3 axis = rng.vec3(-1, 1);
        if (axis.norm() < 1e-6) continue;
        const RotMat r = RotMat::from_axis_angle(axis, rng.uniform(-10, 10));
        CHECK(r.orthonormality_error() < 1e-9);
        CHECK(std::abs(r.matrix().det() - 1.0) < 1e-9);
    }

    Mat3 bad = Mat3::identity();
    bad(0, 0) = 1.1;
    CHECK_THROWS_AS(RotMat::from_matrix(bad), Error);
}

TEST_CASE("quaternion bridge") {
    const double th = 0.7;
    const Quat q = to_quaternion(RotMat::rot_z(th));
    CHECK(q.w == Catch::Approx(std::cos(th / 2)).margin(1e-12));
    CHECK(q.x == Catch::Approx(0.0).margin(1e-12));
    CHECK(q.y == Catch::Approx(0.0).margin(1e-12));
    CHECK(q.z == Catch::Approx(std::sin(th / 2)).margin(1e-12));

    // all four extraction branches: reconstruct R from q and compare
    oracles::Rng rng(15);
    auto check_roundtrip = [](const RotMat& r) {
        const Quat u = to_quaternion(r);
        CHECK(u.w * u.w + u.x * u.x + u.y * u.y + u.z * u.z == Catch::Approx(1.0).margin(1e-12));
        Mat3 back;
        back(0, 0) = 1 - 2 * (u.y * u.y + u.z * u.z);
        back(0, 1) = 2 * (u.x * u.y - u.w * u.z);
        back(0, 2) = 2 * (u.x * u.z + u.w * u.y);
        back(1, 0) = 2 * (u.x * u.y + u.w * u.z);
        back(1, 1) = 1 - 2 * (u.x * u.x + u.z * u.z);
        back(1, 2) = 2 * (u.y * u.z - u.w * u.x);
        back(2, 0) = 2 * (u.x * u.z - u.w * u.y);
        back(2, 1) = 2 * (u.y * u.z + u.w * u.x);
        back(2, 2) = 1 - 2 * (u.x * u.x + u.y * u.y);
        CHECK((back - r.matrix()).max_abs() < 1e-12);
    };
    check_roundtrip(RotMat::rot_x(3.1));  // trace <= 0, x branch
    check_roundtrip(RotMat::rot_y(3.1));  // y branch
    check_roundtrip(RotMat::rot_z(3.1));  // z branch
    for (int i = 0; i < 100; ++i)
        check_roundtrip(RotMat::from_rpy(rng.uniform(-3.1, 3.1), rng.uniform(-1.5, 1.5),
                                         rng.uniform(-3.1, 3.1)));
}

TEST_CASE("solve5 identity and error path") {
    Mat5 eye = Mat5::identity();
    Vec5 e1{1, 0, 0, 0, 0};
    const Vec5 x = solve5(eye, e1);
    for (int i = 0; i < 5; ++i) CHECK(x[static_cast<std::size_t>(i)] == e1[static_cast<std::size_t>(i)]);

    Mat5 singular;  // two equal rows
    for (int j = 0; j < 5; ++j) {
        singular(0, static_cast<std::size_t>(j)) = 1.0;
        singular(1, static_cast<std::size_t>(j)) = 1.0;
        singular(2, static_cast<std::size_t>(j)) = j == 2;
        singular(3, static_cast<std::size_t>(j)) = j == 3;
        singular(4, static_cast<std::size_t>(j)) = j == 4;
    }
    CHECK_THROWS_MATCHES(solve5(singular, e1), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::SingularMatrix;
                         }));
}

TEST_CASE("solve5 reproduces the hover thrust split") {
    const PlatformGeometry geom;  // l1=0.2, l2=0.35, k_d=0.02
    const Mat5 a = allocation_matrix(geom);
    const Vec5 hover{0.0, -19.62, 0.0, 0.0, 0.0};
    const Vec5 u = solve5(a, hover);
    CHECK(u[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(u[1] == Catch::Approx(9.81).margin(1e-12));
    CHECK(u[2] == Catch::Approx(0.0).margin(1e-12));
    CHECK(u[3] == Catch::Approx(9.81).margin(1e-12));
    CHECK(u[4] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("solve5 residual on random systems") {
    oracles::Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        Mat5 a;
        Vec5 b;
        for (std::size_t i = 0; i < 5; ++i) {
            b[i] = rng.uniform(-10, 10);
            for (std::size_t j = 0; j < 5; ++j) a(i, j) = rng.uniform(-1, 1);
        }
        const Vec5 x = solve5(a, b);
        const Vec5 ax = a.multiply(x);
        double rnorm = 0.0, bnorm = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            rnorm += (ax[i] - b[i]) * (ax[i] - b[i]);
            bnorm += b[i] * b[i];
        }
        CHECK(std::sqrt(rnorm) <= 1e-9 * std::sqrt(bnorm));
    }
}
