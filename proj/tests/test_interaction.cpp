#include <catch2/catch_amalgamated.hpp>

#include "amsim/interaction.hpp"

using namespace amsim;

namespace {

ContactSurface wall() {
    // Vertical plane at x = 0.3, facing the approaching robot.
    return {{0.3, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
}

}  // namespace

TEST_CASE("contact force is a compression-only normal spring") {
    const ContactSurface s = wall();
    CHECK(contact_force_on_environment({0.2, 0, 0}, s, 290.0).norm() == 0.0);

    const Vec3 f_env = contact_force_on_environment({0.3 + 0.0138, 0.1, -0.2}, s, 290.0);
    CHECK(f_env.norm() == Catch::Approx(4.0).margin(0.01));
    // force on the environment points into the surface (-normal = +x here)
    CHECK(f_env.x > 0.0);
    CHECK(f_env.y == 0.0);
    CHECK(f_env.z == 0.0);

    StiffnessModel m;
    m.c0 = 80.0;
    m.z_lo = 0.08;
    m.z_hi = 0.195;
    const Vec3 soft = contact_force_on_environment({0.325, 0, 0}, s, m, 0.1);
    CHECK(soft.norm() == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("fold detection thresholds") {
    const FoldThresholds thr;  // 4 N / 2 N / 185 N/m

    auto fold = detect_fold(4.05, 290.0, thr, 1.5);
    REQUIRE(fold.has_value());
    CHECK(fold->kind == FoldKind::KneeFold);
    CHECK(fold->force_at_fold == 4.05);
    CHECK(fold->time == 1.5);

    fold = detect_fold(2.05, 80.0, thr);
    REQUIRE(fold.has_value());
    CHECK(fold->kind == FoldKind::AnkleFold);

    CHECK_FALSE(detect_fold(1.0, 185.0, thr).has_value());
    CHECK_FALSE(detect_fold(3.9, 290.0, thr).has_value());
    CHECK_FALSE(detect_fold(1.9, 80.0, thr).has_value());

    // a crossover band suppresses folding inside it
    FoldThresholds banded = thr;
    banded.no_fold_band = 30.0;
    CHECK_FALSE(detect_fold(10.0, 190.0, banded).has_value());
    CHECK(detect_fold(10.0, 250.0, banded).has_value());
}

TEST_CASE("lowering the knee threshold never delays a fold") {
    FoldThresholds thr;
    FoldThresholds lower = thr;
    lower.f_knee = 3.0;
    for (double f : {2.0, 3.5, 4.5, 6.0}) {
        const bool base = detect_fold(f, 290.0, thr).has_value();
        const bool eager = detect_fold(f, 290.0, lower).has_value();
        if (base) CHECK(eager);  // monotone in the threshold
    }
}

TEST_CASE("contact wrench obeys the third law with the mount moment arm") {
    MountTransform mount;
    mount.R_DB = RotMat::rot_y(-M_PI / 2);
    mount.p_BD_B = {0.05, 0.0, 0.05};
    const Vec3 p_e_d{0, 0, 0.15};

    RigidBodyState s;
    s.R_WB = RotMat::rot_z(0.3);
    const Vec3 tip_force_W{-1.2, 0.4, 0.0};

    const WrenchCommand w = contact_wrench_on_body(tip_force_W, s, mount, p_e_d);
    CHECK((s.R_WB * w.force - tip_force_W).norm() < 1e-12);
    const Vec3 r = mount.p_BD_B + mount.R_DB.transpose() * p_e_d;
    CHECK((w.torque - r.cross(w.force)).norm() < 1e-15);
}

TEST_CASE("stiffness schedules") {
    StiffnessSchedule constant;
    constant.mode = StiffnessSchedule::Mode::Constant;
    constant.k_const = 80.0;
    CHECK(constant.value(3.0, nullptr, 0.1) == 80.0);

    StiffnessSchedule ramp;
    ramp.mode = StiffnessSchedule::Mode::Ramp;
    ramp.k_start = 190.0;
    ramp.k_end = 290.0;
    ramp.t_start = 0.0;
    ramp.t_end = 10.0;
    CHECK(ramp.value(-1.0, nullptr, 0.1) == 190.0);
    CHECK(ramp.value(5.0, nullptr, 0.1) == Catch::Approx(240.0));
    CHECK(ramp.value(20.0, nullptr, 0.1) == 290.0);

    StiffnessSchedule from_model;
    from_model.mode = StiffnessSchedule::Mode::FromModel;
    StiffnessModel m;
    m.c0 = 100.0;
    m.z_lo = 0.08;
    m.z_hi = 0.195;
    CHECK(from_model.value(0.0, &m, 0.1) == 100.0);
    CHECK_THROWS_AS(from_model.value(0.0, nullptr, 0.1), Error);
}
