#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "amsim/coupling.hpp"
#include "amsim/dynamics.hpp"
#include "amsim/stiffness.hpp"

namespace amsim {

/// Plane the arm tip pushes against; the normal points out of the surface,
/// toward the approaching robot.
struct ContactSurface {
    Vec3 point_W;
    Vec3 normal_W;

    void validate() const {
        if (std::abs(normal_W.norm() - 1.0) > 1e-9)
            throw Error(ErrorCode::ConfigInvalid, "contact surface normal must be unit length");
    }
};

/// Critical-folding thresholds. The knee joints fail when the extended
/// (stiff) arm is overloaded, the ankle joints when the retracted
/// (compliant) arm is; the crossover stiffness separates the two regimes.
/// An optional band around the crossover is immune to folding.
struct FoldThresholds {
    double f_knee = 4.0;        // N
    double f_ankle = 2.0;       // N
    double k_crossover = 185.0; // N/m
    double no_fold_band = 0.0;  // N/m, half width

    void validate() const {
        if (!(f_knee > 0.0 && f_ankle > 0.0 && k_crossover > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "fold thresholds must be positive");
    }
};

enum class FoldKind { KneeFold, AnkleFold };

inline const char* fold_kind_name(FoldKind k) {
    return k == FoldKind::KneeFold ? "KneeFold" : "AnkleFold";
}

struct FoldEvent {
    double time = 0.0;       // s
    FoldKind kind = FoldKind::KneeFold;
    double force_at_fold = 0.0;  // N
    double stiffness = 0.0;      // N/m
};

/// Penetration depth of a point behind the surface plane (0 when clear).
inline double penetration(const Vec3& p_W, const ContactSurface& s) {
    return std::max(0.0, -(p_W - s.point_W).dot(s.normal_W));
}

/// Spring contact force exerted on the environment: k_s * penetration along
/// -normal. The reaction (+normal) acts on the arm tip.
inline Vec3 contact_force_on_environment(const Vec3& ee_W, const ContactSurface& surface,
                                         double k_s) {
    return (-k_s * penetration(ee_W, surface)) * surface.normal_W;
}

inline Vec3 contact_force_on_environment(const Vec3& ee_W, const ContactSurface& surface,
                                         const StiffnessModel& model, double z_config) {
    return contact_force_on_environment(ee_W, surface, stiffness_at(model, z_config));
}

/// Reaction wrench on the MAV body from a world-frame tip force, moment arm
/// included (the massless arm transmits the load rigidly).
inline WrenchCommand contact_wrench_on_body(const Vec3& force_on_tip_W,
                                            const RigidBodyState& s,
                                            const MountTransform& mount, const Vec3& p_e_d) {
    WrenchCommand w;
    w.force = s.R_WB.inverse_rotate(force_on_tip_W);
    w.torque = end_effector_body(mount, p_e_d).cross(w.force);
    return w;
}

/// Threshold-based critical-folding check. High-stiffness overload folds a
/// knee, low-stiffness overload an ankle; inside the optional crossover
/// band the arm does not fold.
inline std::optional<FoldEvent> detect_fold(double force, double k_s,
                                            const FoldThresholds& thr, double time = 0.0) {
    if (thr.no_fold_band > 0.0 && std::abs(k_s - thr.k_crossover) <= thr.no_fold_band)
        return std::nullopt;
    if (k_s >= thr.k_crossover) {
        if (force > thr.f_knee) return FoldEvent{time, FoldKind::KneeFold, force, k_s};
    } else {
        if (force > thr.f_ankle) return FoldEvent{time, FoldKind::AnkleFold, force, k_s};
    }
    return std::nullopt;
}

/// Commanded stiffness over time: held constant, ramped linearly between
/// two values, or evaluated from the fitted model at the commanded arm
/// height.
struct StiffnessSchedule {
    enum class Mode { Constant, Ramp, FromModel };

    Mode mode = Mode::Constant;
    double k_const = 80.0;   // Constant
    double k_start = 190.0;  // Ramp
    double k_end = 290.0;
    double t_start = 0.0;
    double t_end = 1.0;

    double value(double t, const StiffnessModel* model, double z_config) const {
        switch (mode) {
            case Mode::Constant:
                return k_const;
            case Mode::Ramp: {
                if (t <= t_start) return k_start;
                if (t >= t_end) return k_end;
                return k_start + (k_end - k_start) * (t - t_start) / (t_end - t_start);
            }
            case Mode::FromModel:
                if (!model)
                    throw Error(ErrorCode::ConfigInvalid,
                                "stiffness schedule mode from_model needs a stiffness model");
                return stiffness_at(*model, z_config);
        }
        return k_const;
    }
};

}  // namespace amsim
