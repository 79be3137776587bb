#pragma once

#include <array>
#include <cmath>

#include "amsim/dynamics.hpp"
#include "amsim/math.hpp"

namespace amsim {

/// Geometry and motor coefficients of the tri-tiltrotor platform.
/// l1/l2 are the front-group and tail moment arms, k_d the rear
/// drag-moment coefficient. Thrust follows T = k_f w^2 per rotor.
struct PlatformGeometry {
    double l1 = 0.2;            // m
    double l2 = 0.35;           // m
    double k_d = 0.02;          // m
    double k_f = 8.1e-6;        // N s^2
    double k_f_rear = 4.05e-6;  // N s^2
    double omega_max = 1143.0;  // rad/s

    void validate() const {
        if (!(l1 > 0.0 && l2 > 0.0 && k_f > 0.0 && k_f_rear > 0.0 && omega_max > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "platform geometry must have positive arms and coefficients");
    }
};

/// Tilt angles, group thrusts and per-rotor speeds. T12/T34 are magnitudes;
/// the rear rotor is bidirectional so T5 and omega[4] carry sign.
struct ActuatorCommand {
    double t12 = 0.0;     // N
    double t34 = 0.0;     // N
    double t5 = 0.0;      // N, signed
    double alpha0 = 0.0;  // rad, rear-facing tilt group
    double alpha1 = 0.0;  // rad, front-facing tilt group
    std::array<double, 5> omega{};  // rad/s
    bool saturated = false;
};

/// Reduced wrench [F_x, F_z, M_x, M_y, M_z]; F_y is not producible and is
/// discarded before allocation.
inline Vec5 reduced_wrench(const WrenchCommand& w) {
    return {w.force.x, w.force.z, w.torque.x, w.torque.y, w.torque.z};
}

/// The 5x5 map from u = [T12 sin a1, T12 cos a1, T34 sin a0, T34 cos a0, T5]
/// to the reduced wrench.
inline Mat5 allocation_matrix(const PlatformGeometry& g) {
    g.validate();
    Mat5 a;
    a.m = {1.0,  0.0, -1.0, 0.0,   0.0,
           0.0, -1.0,  0.0, -1.0, -1.0,
           0.0,  g.l1, 0.0, -g.l1, 0.0,
           0.0,  0.0,  0.0,  0.0, -g.l2,
           g.l1, 0.0,  g.l1, 0.0, -g.k_d};
    return a;
}

/// Rotor speeds from the quadratic thrust model. Speeds beyond omega_max are
/// clamped and the saturation flag raised; thrusts are left untouched.
inline void motor_speeds(ActuatorCommand& cmd, const PlatformGeometry& g) {
    const double w12 = std::sqrt(cmd.t12 / (2.0 * g.k_f));
    const double w34 = std::sqrt(cmd.t34 / (2.0 * g.k_f));
    const double w5 = (cmd.t5 >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::abs(cmd.t5) / g.k_f_rear);
    cmd.omega = {w12, w12, w34, w34, w5};
    cmd.saturated = false;
    for (double& w : cmd.omega) {
        if (std::abs(w) > g.omega_max) {
            w = std::copysign(g.omega_max, w);
            cmd.saturated = true;
        }
    }
}

/// Maximum total thrust in kilogram-force: all four main rotors plus the
/// rear rotor at omega_max.
inline double max_total_thrust_kg(const PlatformGeometry& g) {
    g.validate();
    const double w2 = g.omega_max * g.omega_max;
    return (4.0 * g.k_f * w2 + g.k_f_rear * w2) / 9.81;
}

/// Allocator with the matrix factored once per geometry.
class Allocator {
public:
    explicit Allocator(const PlatformGeometry& g) : geom_(g), lu_(allocation_matrix(g)) {
        detail::lu_factor<5>(lu_, perm_);
    }

    const PlatformGeometry& geometry() const { return geom_; }

    /// Inverse allocation: reduced wrench -> actuator command.
    /// Tilt angles fall back to 0 when a group's thrust vanishes.
    ActuatorCommand allocate(const Vec5& wrench) const {
        const Vec5 u = detail::lu_solve_factored<5>(lu_, perm_, wrench);
        ActuatorCommand cmd;
        cmd.t12 = std::hypot(u[0], u[1]);
        cmd.t34 = std::hypot(u[2], u[3]);
        cmd.t5 = u[4];
        cmd.alpha1 = (std::abs(u[0]) < 1e-12 && std::abs(u[1]) < 1e-12) ? 0.0 : std::atan2(u[0], u[1]);
        cmd.alpha0 = (std::abs(u[2]) < 1e-12 && std::abs(u[3]) < 1e-12) ? 0.0 : std::atan2(u[2], u[3]);
        motor_speeds(cmd, geom_);
        return cmd;
    }

    ActuatorCommand allocate(const WrenchCommand& w) const { return allocate(reduced_wrench(w)); }

private:
    PlatformGeometry geom_;
    Mat5 lu_;
    std::array<std::size_t, 5> perm_;
};

inline ActuatorCommand allocate(const Vec5& wrench, const PlatformGeometry& g) {
    return Allocator(g).allocate(wrench);
}

/// Forward map: actuator command back to the wrench it produces (F_y = 0).
inline WrenchCommand apply_actuators(const ActuatorCommand& c, const PlatformGeometry& g) {
    const double s1 = std::sin(c.alpha1), c1 = std::cos(c.alpha1);
    const double s0 = std::sin(c.alpha0), c0 = std::cos(c.alpha0);
    WrenchCommand w;
    w.force = {c.t12 * s1 - c.t34 * s0, 0.0, -c.t12 * c1 - c.t34 * c0 - c.t5};
    w.torque = {g.l1 * (c.t12 * c1 - c.t34 * c0), -g.l2 * c.t5,
                g.l1 * (c.t12 * s1 + c.t34 * s0) - g.k_d * c.t5};
    return w;
}

/// Optional first-order actuator lag (disabled when tau == 0): thrusts and
/// tilt angles relax toward the command with time constant tau.
class ActuatorLag {
public:
    explicit ActuatorLag(double tau) : tau_(tau) {}

    ActuatorCommand advance(const ActuatorCommand& cmd, double dt) {
        if (tau_ <= 0.0) {
            state_ = cmd;
            primed_ = true;
            return cmd;
        }
        if (!primed_) {
            state_ = cmd;
            primed_ = true;
            return cmd;
        }
        const double a = 1.0 - std::exp(-dt / tau_);
        state_.t12 += a * (cmd.t12 - state_.t12);
        state_.t34 += a * (cmd.t34 - state_.t34);
        state_.t5 += a * (cmd.t5 - state_.t5);
        state_.alpha0 += a * (cmd.alpha0 - state_.alpha0);
        state_.alpha1 += a * (cmd.alpha1 - state_.alpha1);
        state_.omega = cmd.omega;
        state_.saturated = cmd.saturated;
        return state_;
    }

private:
    double tau_;
    bool primed_ = false;
    ActuatorCommand state_;
};

}  // namespace amsim
