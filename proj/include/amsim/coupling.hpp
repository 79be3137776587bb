#pragma once

#include "amsim/dynamics.hpp"
#include "amsim/math.hpp"

namespace amsim {

/// Rigid mounting of the delta base on the MAV body: R_DB maps body-frame
/// vectors into the delta-base frame, p_BD_B is the delta-base origin in
/// the body frame.
struct MountTransform {
    RotMat R_DB;
    Vec3 p_BD_B;
};

/// Kinematic coupling law: shift the end-effector reference by the base
/// position error and the rotational mount correction,
///   p_d = p_ref + R_DB e_p + R_DB R_ref^T R p_BD.
/// The mount term is nonzero even at zero pose error; pair p_ref with
/// compensation_reference() so that a perfectly tracking base commands the
/// unshifted target.
inline Vec3 compensate(const Vec3& p_ref_e_d, const Vec3& e_p_B, const RotMat& r_wb,
                       const RotMat& r_wb_ref, const MountTransform& mount) {
    const Vec3 mount_term = mount.R_DB * (r_wb_ref.transpose() * r_wb * mount.p_BD_B);
    return p_ref_e_d + mount.R_DB * e_p_B + mount_term;
}

/// Reference datum for the coupling law: subtract the constant mount offset
/// once, so compensate() returns exactly the desired target at zero error.
inline Vec3 compensation_reference(const Vec3& p_desired_e_d, const MountTransform& mount) {
    return p_desired_e_d - mount.R_DB * mount.p_BD_B;
}

/// End-effector position in the world frame through the chain W <- B <- D:
///   p = p_body + R_WB (p_BD + R_DB^T p_E_D).
inline Vec3 end_effector_world(const RigidBodyState& s, const MountTransform& mount,
                               const Vec3& p_e_d) {
    return s.p_W + s.R_WB * (mount.p_BD_B + mount.R_DB.transpose() * p_e_d);
}

/// Body-frame offset from the COM to the end-effector tip.
inline Vec3 end_effector_body(const MountTransform& mount, const Vec3& p_e_d) {
    return mount.p_BD_B + mount.R_DB.transpose() * p_e_d;
}

}  // namespace amsim
