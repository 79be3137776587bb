#pragma once

#include <optional>

#include "amsim/dynamics.hpp"
#include "amsim/math.hpp"

namespace amsim {

/// Reference for the pose loop, produced by a trajectory source. Rotation
/// reference carries the pitch and yaw targets; roll is owned by the
/// position loop (lateral force is produced by rolling).
struct PoseReference {
    Vec3 p_ref_W;
    Vec3 v_ref_W;
    Vec3 a_ref_W;
    RotMat R_WB_ref;
    Vec3 w_ref_W;    // rad/s, world frame
    Vec3 dw_ref_W;   // rad/s^2, world frame
};

/// Diagonal, positive gain matrices of the cascaded PD loops, stored as
/// their diagonals.
struct ControllerGains {
    Vec3 kp{8.0, 8.0, 8.0};
    Vec3 dp{5.0, 5.0, 5.0};
    Vec3 kr{4.0, 4.0, 1.5};
    Vec3 dw{0.6, 0.6, 0.3};

    void validate() const {
        for (int i = 0; i < 3; ++i) {
            if (!(kp[i] > 0.0 && dp[i] > 0.0 && kr[i] > 0.0 && dw[i] > 0.0))
                throw Error(ErrorCode::ConfigInvalid, "controller gains must be positive");
        }
    }
};

struct PositionErrors {
    Vec3 e_p_B;
    Vec3 e_v_B;
};

struct AttitudeErrors {
    Vec3 e_R;
    Vec3 e_w;
};

/// Position and velocity errors rotated into the body frame:
///   e_p = R^T (p_ref - p),  e_v = R^T v_ref - v.
inline PositionErrors position_errors(const RigidBodyState& s, const PoseReference& r) {
    return {s.R_WB.inverse_rotate(r.p_ref_W - s.p_W),
            s.R_WB.inverse_rotate(r.v_ref_W) - s.v_B};
}

/// Outer-loop PD force command in the body frame:
///   f_c = Kp e_p + Dp e_v - f_g_B + m (R^T a_ref + w x v).
inline Vec3 force_command(const PositionErrors& e, const RigidBodyState& s,
                          const PoseReference& r, const InertialParams& params,
                          const ControllerGains& g) {
    const Vec3 f_g_B = s.R_WB.inverse_rotate(params.gravity_force_W());
    return g.kp.cwise(e.e_p_B) + g.dp.cwise(e.e_v_B) - f_g_B +
           params.mass * (s.R_WB.inverse_rotate(r.a_ref_W) + s.w_B.cross(s.v_B));
}

/// Attitude-loop target rotation. The x force component is producible
/// instantaneously and is removed; the remaining (y, z) force is rotated to
/// the world frame and its opposite direction becomes the desired thrust
/// axis z_d, so that level hover maps to R_d = I. The reference heading
/// x_ref is kept as the first column, which preserves the commanded pitch
/// and yaw exactly.
inline RotMat desired_rotation(const Vec3& f_c_B, const RigidBodyState& s,
                               const PoseReference& r, double eps_f = 1e-6) {
    const Vec3 f_bar_B{0.0, f_c_B.y, f_c_B.z};
    const Vec3 f_bar_W = s.R_WB * f_bar_B;
    const double n = f_bar_W.norm();
    if (n <= eps_f)
        throw Error(ErrorCode::DegenerateForce, "thrust-axis force below eps_f");
    const Vec3 z_d = -f_bar_W / n;
    const Vec3 x_ref = r.R_WB_ref.col(0);
    const Vec3 c = z_d.cross(x_ref);
    const double cn = c.norm();
    if (cn < 1e-9)
        throw Error(ErrorCode::SingularCross, "thrust axis parallel to reference heading");
    const Vec3 y_d = c / cn;
    const Vec3 z_col = x_ref.cross(y_d).normalized();
    return RotMat::from_columns(x_ref, y_d, z_col);
}

/// Inner-loop errors, both in the body frame and both signed as
/// reference-minus-state (same convention as the position loop):
///   e_R = 1/2 vee(R^T R_d - R_d^T R),  e_w = R^T w_ref - w.
inline AttitudeErrors attitude_errors(const RigidBodyState& s, const RotMat& r_d,
                                      const Vec3& w_ref_W) {
    const Mat3 rt_rd = s.R_WB.matrix().transpose() * r_d.matrix();
    const Vec3 e_R = vee((rt_rd - rt_rd.transpose()) * 0.5);
    const Vec3 e_w = s.R_WB.inverse_rotate(w_ref_W) - s.w_B;
    return {e_R, e_w};
}

inline AttitudeErrors attitude_errors(const RigidBodyState& s, const RotMat& r_d,
                                      const PoseReference& r) {
    return attitude_errors(s, r_d, r.w_ref_W);
}

/// Torque command:
///   tau = KR e_R + Dw e_w + w x J w - J (skew(w) w_ref_B - dw_ref_B),
/// with the world-frame rate references transported into the body frame.
inline Vec3 torque_command(const AttitudeErrors& e, const RigidBodyState& s,
                           const PoseReference& r, const InertialParams& params,
                           const ControllerGains& g) {
    const Vec3 w_ref_B = s.R_WB.inverse_rotate(r.w_ref_W);
    const Vec3 dw_ref_B = s.R_WB.inverse_rotate(r.dw_ref_W);
    return g.kr.cwise(e.e_R) + g.dw.cwise(e.e_w) + s.w_B.cross(params.inertia * s.w_B) -
           params.inertia * (s.w_B.cross(w_ref_B) - dw_ref_B);
}

/// Cascaded pose controller. Stateless apart from the held desired rotation,
/// which bridges force zero-crossings (DegenerateForce) without an attitude
/// discontinuity.
class PoseController {
public:
    PoseController(const ControllerGains& gains, double eps_f = 1e-6)
        : gains_(gains), eps_f_(eps_f) {
        gains_.validate();
    }

    struct Output {
        WrenchCommand wrench;
        RotMat R_d;
        PositionErrors position;
        AttitudeErrors attitude;
        bool degenerate_force_hold = false;
    };

    Output update(const RigidBodyState& s, const PoseReference& r,
                  const InertialParams& params) {
        Output out;
        out.position = position_errors(s, r);
        out.wrench.force = force_command(out.position, s, r, params, gains_);
        try {
            out.R_d = desired_rotation(out.wrench.force, s, r, eps_f_);
            held_R_d_ = out.R_d;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateForce) throw;
            out.R_d = held_R_d_.value_or(r.R_WB_ref);
            out.degenerate_force_hold = true;
        }
        out.attitude = attitude_errors(s, out.R_d, r);
        out.wrench.torque = torque_command(out.attitude, s, r, params, gains_);
        return out;
    }

    const ControllerGains& gains() const { return gains_; }

private:
    ControllerGains gains_;
    double eps_f_;
    std::optional<RotMat> held_R_d_;
};

}  // namespace amsim
