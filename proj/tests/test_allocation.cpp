#include <catch2/catch_amalgamated.hpp>

#include "amsim/allocation.hpp"
#include "oracles.hpp"

using namespace amsim;

namespace {

// 5x5 determinant by Laplace expansion; test-local, independent of the LU.
double det5(const Mat5& a) {
    auto det4 = [](const std::array<std::array<double, 4>, 4>& m) {
        double d = 0.0;
        for (int c = 0; c < 4; ++c) {
            std::array<std::array<double, 3>, 3> sub{};
            for (int i = 1; i < 4; ++i) {
                int jj = 0;
                for (int j = 0; j < 4; ++j) {
                    if (j == c) continue;
                    sub[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(jj++)] =
                        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                }
            }
            const double d3 = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1]) -
                              sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0]) +
                              sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
            d += ((c % 2 == 0) ? 1.0 : -1.0) * m[0][static_cast<std::size_t>(c)] * d3;
        }
        return d;
    };
    double d = 0.0;
    for (int c = 0; c < 5; ++c) {
        std::array<std::array<double, 4>, 4> sub{};
        for (int i = 1; i < 5; ++i) {
            int jj = 0;
            for (int j = 0; j < 5; ++j) {
                if (j == c) continue;
                sub[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(jj++)] =
                    a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        }
        d += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, static_cast<std::size_t>(c)) * det4(sub);
    }
    return d;
}

Vec5 sub(const Vec5& a, const Vec5& b) {
    Vec5 r;
    for (std::size_t i = 0; i < 5; ++i) r[i] = a[i] - b[i];
    return r;
}

double norm5(const Vec5& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("allocation matrix entries and regularity") {
    PlatformGeometry g;
    const Mat5 a = allocation_matrix(g);
    const double expect[25] = {1, 0,   -1, 0,    0,     //
                               0, -1,  0,  -1,   -1,    //
                               0, 0.2, 0,  -0.2, 0,     //
                               0, 0,   0,  0,    -0.35, //
                               0.2, 0, 0.2, 0,   -0.02};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(a(i, j) == expect[i * 5 + j]);

    CHECK(std::abs(det5(a)) > 1e-6);

    const Vec5 u{0, 9.81, 0, 9.81, 0};
    const Vec5 w = a.multiply(u);
    const Vec5 expect_w{0, -19.62, 0, 0, 0};
    CHECK(norm5(sub(w, expect_w)) < 1e-12);
}

TEST_CASE("allocate: zero, hover, pure yaw") {
    Allocator alloc((PlatformGeometry()));

    const ActuatorCommand zero = alloc.allocate(Vec5{0, 0, 0, 0, 0});
    CHECK(zero.t12 == 0.0);
    CHECK(zero.t34 == 0.0);
    CHECK(zero.t5 == 0.0);
    CHECK(zero.alpha0 == 0.0);  // atan2 tie-break
    CHECK(zero.alpha1 == 0.0);

    const ActuatorCommand hover = alloc.allocate(Vec5{0, -19.62, 0, 0, 0});
    CHECK(hover.t12 == Catch::Approx(9.81).margin(1e-12));
    CHECK(hover.t34 == Catch::Approx(9.81).margin(1e-12));
    CHECK(std::abs(hover.t5) < 1e-12);
    CHECK(std::abs(hover.alpha0) < 1e-12);
    CHECK(std::abs(hover.alpha1) < 1e-12);

    const ActuatorCommand yaw = alloc.allocate(Vec5{0, 0, 0, 0, 1});
    CHECK(yaw.t12 == Catch::Approx(2.5).margin(1e-12));
    CHECK(yaw.t34 == Catch::Approx(2.5).margin(1e-12));
    CHECK(std::abs(yaw.t5) < 1e-12);
    CHECK(yaw.alpha0 == Catch::Approx(M_PI / 2).margin(1e-12));
    CHECK(yaw.alpha1 == Catch::Approx(M_PI / 2).margin(1e-12));
}

TEST_CASE("motor speeds from the quadratic model") {
    PlatformGeometry g;
    ActuatorCommand c;
    c.t12 = 9.81;
    motor_speeds(c, g);
    CHECK(c.omega[0] == Catch::Approx(778.2).margin(0.1));
    CHECK(c.omega[0] == c.omega[1]);
    // the map inverts the model exactly
    CHECK(g.k_f * 2.0 * c.omega[0] * c.omega[0] == Catch::Approx(c.t12).margin(1e-12));

    ActuatorCommand rear;
    rear.t5 = -1.0;
    motor_speeds(rear, g);
    CHECK(rear.omega[4] == Catch::Approx(-496.9).margin(0.1));

    ActuatorCommand off;
    motor_speeds(off, g);
    for (double w : off.omega) CHECK(w == 0.0);
    CHECK_FALSE(off.saturated);
}

TEST_CASE("saturation clamps speeds and raises the flag") {
    PlatformGeometry g;
    ActuatorCommand c;
    c.t12 = 4.0 * g.k_f * g.omega_max * g.omega_max;  // double the per-pair limit
    motor_speeds(c, g);
    CHECK(c.saturated);
    CHECK(c.omega[0] == g.omega_max);
}

TEST_CASE("maximum thrust and thrust-to-weight") {
    PlatformGeometry g;
    const double t_max = max_total_thrust_kg(g);
    CHECK(std::abs(t_max - 4.85) / 4.85 < 0.01);
    CHECK(std::abs(t_max / 2.0 - 2.43) / 2.43 < 0.01);

    // linear in each k coefficient
    PlatformGeometry g2 = g;
    g2.k_f *= 2.0;
    const double w2 = g.omega_max * g.omega_max;
    CHECK(max_total_thrust_kg(g2) ==
          Catch::Approx((8.0 * g.k_f * w2 + g.k_f_rear * w2) / 9.81).margin(1e-12));
}

TEST_CASE("apply_actuators forward map") {
    PlatformGeometry g;
    Allocator alloc(g);

    const WrenchCommand hover = apply_actuators(alloc.allocate(Vec5{0, -19.62, 0, 0, 0}), g);
    CHECK((hover.force - Vec3{0, 0, -19.62}).norm() < 1e-12);
    CHECK(hover.torque.norm() < 1e-12);

    ActuatorCommand tilt;
    tilt.t12 = 1.0;
    tilt.alpha1 = M_PI / 2;
    const WrenchCommand w = apply_actuators(tilt, g);
    CHECK(w.force.x == Catch::Approx(1.0).margin(1e-12));
    CHECK(w.torque.z == Catch::Approx(g.l1).margin(1e-12));
}

TEST_CASE("allocation roundtrip over random wrenches") {
    PlatformGeometry g;
    Allocator alloc(g);
    oracles::Rng rng(31);
    double worst = 0.0;
    int accepted = 0;
    while (accepted < 2000) {
        const Vec5 w{rng.uniform(-20, 20), rng.uniform(-40, 5), rng.uniform(-5, 5),
                     rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const ActuatorCommand cmd = alloc.allocate(w);
        if (cmd.saturated) continue;
        ++accepted;
        const WrenchCommand back = apply_actuators(cmd, g);
        const Vec5 w2 = reduced_wrench(back);
        CHECK(back.force.y == 0.0);
        worst = std::max(worst, norm5(sub(w2, w)) / std::max(norm5(w), 1e-12));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("allocation is scale-consistent in thrust") {
    Allocator alloc((PlatformGeometry()));
    oracles::Rng rng(32);
    for (int i = 0; i < 200; ++i) {
        Vec5 w{rng.uniform(-20, 20), rng.uniform(-40, -1), rng.uniform(-5, 5),
               rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const double s = rng.uniform(0.1, 4.0);
        Vec5 ws;
        for (std::size_t k = 0; k < 5; ++k) ws[k] = s * w[k];
        const ActuatorCommand a = alloc.allocate(w);
        const ActuatorCommand b = alloc.allocate(ws);
        CHECK(b.t12 == Catch::Approx(s * a.t12).epsilon(1e-9).margin(1e-12));
        CHECK(b.t34 == Catch::Approx(s * a.t34).epsilon(1e-9).margin(1e-12));
        CHECK(b.t5 == Catch::Approx(s * a.t5).epsilon(1e-9).margin(1e-12));
        CHECK(b.alpha0 == Catch::Approx(a.alpha0).epsilon(1e-9).margin(1e-12));
        CHECK(b.alpha1 == Catch::Approx(a.alpha1).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("actuator lag relaxes toward the command") {
    ActuatorLag lag(0.1);
    ActuatorCommand cmd;
    cmd.t12 = 10.0;
    ActuatorCommand first = lag.advance(cmd, 1e-3);
    CHECK(first.t12 == 10.0);  // primed to the first command
    ActuatorCommand target;
    target.t12 = 0.0;
    ActuatorCommand later = lag.advance(target, 1e-3);
    CHECK(later.t12 < 10.0);
    CHECK(later.t12 > 9.8);  // one millisecond of a 100 ms lag

    ActuatorLag off(0.0);
    CHECK(off.advance(cmd, 1e-3).t12 == 10.0);
}
