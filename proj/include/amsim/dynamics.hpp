#pragma once

#include "amsim/math.hpp"

namespace amsim {

/// Pose and twist of the MAV body frame. Position in world frame,
/// velocities in body frame (NED both).
struct RigidBodyState {
    Vec3 p_W;
    RotMat R_WB;
    Vec3 v_B;
    Vec3 w_B;

    bool is_finite() const {
        return p_W.is_finite() && R_WB.is_finite() && v_B.is_finite() && w_B.is_finite();
    }
};

struct InertialParams {
    double mass = 2.0;           // kg
    Mat3 inertia;                // kg m^2, body frame
    double gravity = 9.81;       // m/s^2, along +z_W (NED)

    Mat3 inertia_inv;            // cached at construction

    InertialParams(double m, const Mat3& j, double g = 9.81)
        : mass(m), inertia(j), gravity(g) {
        if (!(m > 0.0)) throw Error(ErrorCode::ConfigInvalid, "mass must be positive");
        if ((j - j.transpose()).max_abs() > 1e-9)
            throw Error(ErrorCode::ConfigInvalid, "inertia matrix must be symmetric");
        // Sylvester criterion for positive definiteness.
        const double m1 = j(0, 0);
        const double m2 = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        if (!(m1 > 0.0 && m2 > 0.0 && j.det() > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "inertia matrix must be positive definite");
        inertia_inv = inverse(j);
    }

    /// Gravity force on the platform, world frame (down positive).
    Vec3 gravity_force_W() const { return {0.0, 0.0, mass * gravity}; }
};

/// Force/torque command pair, body frame. The y force component is not
/// producible by the platform and is dropped at the allocation boundary.
struct WrenchCommand {
    Vec3 force;   // N
    Vec3 torque;  // N m

    bool is_finite() const { return force.is_finite() && torque.is_finite(); }
};

struct StateDerivative {
    Vec3 dp_W;
    Mat3 dR_WB;
    Vec3 dv_B;
    Vec3 dw_B;
};

/// Body-frame Newton-Euler equations:
///   m (dv + w x v) = f_g_B + f,   J dw + w x J w = tau,
/// with kinematics dp_W = R v and dR = R skew(w).
inline StateDerivative derivative(const RigidBodyState& s, const InertialParams& params,
                                  const WrenchCommand& w) {
    const Vec3 f_g_B = s.R_WB.inverse_rotate(params.gravity_force_W());
    StateDerivative d;
    d.dp_W = s.R_WB * s.v_B;
    d.dR_WB = s.R_WB.matrix() * skew(s.w_B);
    d.dv_B = (f_g_B + w.force) / params.mass - s.w_B.cross(s.v_B);
    d.dw_B = params.inertia_inv * (w.torque - s.w_B.cross(params.inertia * s.w_B));
    return d;
}

namespace detail {

struct RawState {
    Vec3 p;
    Mat3 r;
    Vec3 v;
    Vec3 w;
};

inline RawState advance(const RigidBodyState& s, const StateDerivative& d, double h) {
    return {s.p_W + h * d.dp_W, s.R_WB.matrix() + h * d.dR_WB, s.v_B + h * d.dv_B,
            s.w_B + h * d.dw_B};
}

inline RigidBodyState as_state(const RawState& r) {
    return {r.p, RotMat::from_matrix_unchecked(r.r), r.v, r.w};
}

}  // namespace detail

/// One classical RK4 step of the rigid-body dynamics under a held wrench.
/// Requires 0 < dt <= 0.01. The integrated rotation is projected back onto
/// SO(3) whenever its orthonormality drift exceeds 1e-9.
inline RigidBodyState step(const RigidBodyState& s, const InertialParams& params,
                           const WrenchCommand& w, double dt) {
    if (!(dt > 0.0 && dt <= 0.01))
        throw Error(ErrorCode::ConfigInvalid, "dt must be in (0, 0.01]");

    const StateDerivative k1 = derivative(s, params, w);
    const StateDerivative k2 = derivative(detail::as_state(detail::advance(s, k1, dt / 2)), params, w);
    const StateDerivative k3 = derivative(detail::as_state(detail::advance(s, k2, dt / 2)), params, w);
    const StateDerivative k4 = derivative(detail::as_state(detail::advance(s, k3, dt)), params, w);

    RigidBodyState out;
    out.p_W = s.p_W + (dt / 6.0) * (k1.dp_W + 2.0 * k2.dp_W + 2.0 * k3.dp_W + k4.dp_W);
    Mat3 r = s.R_WB.matrix() + (dt / 6.0) * (k1.dR_WB + 2.0 * k2.dR_WB + 2.0 * k3.dR_WB + k4.dR_WB);
    out.v_B = s.v_B + (dt / 6.0) * (k1.dv_B + 2.0 * k2.dv_B + 2.0 * k3.dv_B + k4.dv_B);
    out.w_B = s.w_B + (dt / 6.0) * (k1.dw_B + 2.0 * k2.dw_B + 2.0 * k3.dw_B + k4.dw_B);

    RotMat rot = RotMat::from_matrix_unchecked(r);
    if (rot.orthonormality_error() > 1e-9) rot = rot.renormalized();
    out.R_WB = rot;

    if (!out.is_finite()) throw Error(ErrorCode::NonFiniteState, "integrator produced non-finite state");
    return out;
}

}  // namespace amsim
