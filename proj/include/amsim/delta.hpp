#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "amsim/math.hpp"

namespace amsim {

/// Dimensions of the origami delta arm. The delta-base frame D sits on the
/// base plate with +z pointing into the workspace; leg i is mounted at
/// azimuth gamma_i = 2 pi i / 3 about z_D. Each parallelogram bar of length
/// l_m carries an extra fold segment l_e at both ends; because the fold
/// axes of those end joints do not intersect, the effective distal length
/// varies with the end-effector position.
struct DeltaGeometry {
    double l_p = 0.06;   // m, proximal link
    double l_m = 0.12;   // m, parallelogram bar
    double l_e = 0.01;   // m, end-fold segment (one per end)
    double r_d = 0.05;   // m, base radius
    double r_e = 0.025;  // m, end-effector plate radius
    double theta_min = -1.6;  // rad, servo range
    double theta_max = 2.2;   // rad

    void validate() const {
        if (!(l_p > 0.0 && l_m > 0.0 && l_e > 0.0 && r_d > 0.0 && r_e > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "delta geometry lengths must be positive");
        if (!(r_d > r_e))
            throw Error(ErrorCode::ConfigInvalid, "delta base radius must exceed end-effector radius");
        if (!(theta_min < theta_max))
            throw Error(ErrorCode::ConfigInvalid, "delta joint range is empty");
    }

    double r_de() const { return r_d - r_e; }
    static double leg_azimuth(int leg) { return 2.0 * M_PI * leg / 3.0; }

    /// Nominal distal length of the ideal-delta limit.
    double l_d_nominal() const { return l_m + 2.0 * l_e; }
};

/// Hip servo angles, one per leg, measured about the horizontal hip axis
/// (positive rotates the knee toward the workspace).
struct JointAngles {
    std::array<double, 3> theta{};

    double operator[](int i) const { return theta[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return theta[static_cast<std::size_t>(i)]; }
};

/// End-effector target position, delta-base frame D.
using EndEffectorTarget = Vec3;

namespace detail {

/// Target rotated into leg i's frame (hip axis along local x, reach along
/// local y): p_leg = Rot_z(-gamma_i) p.
inline Vec3 to_leg_frame(const Vec3& p_e_d, int leg) {
    const double g = DeltaGeometry::leg_azimuth(leg);
    const double c = std::cos(g), s = std::sin(g);
    // Rot_z(-g) * p
    return {c * p_e_d.x + s * p_e_d.y, -s * p_e_d.x + c * p_e_d.y, p_e_d.z};
}

/// Effective distal length as a function of the hip-axis component of the
/// leg-frame target. Throws when the parallelogram cannot skew that far.
inline double distal_length_from_parallel(double p_par, const DeltaGeometry& g) {
    const double rem = g.l_m * g.l_m - p_par * p_par;
    if (rem < 0.0)
        throw Error(ErrorCode::OutOfParallelogramRange,
                    "hip-axis component exceeds parallelogram bar length");
    const double a = std::sqrt(rem) + 2.0 * g.l_e;
    return std::sqrt(p_par * p_par + a * a);
}

/// d(l_d^2)/d(p_par); used by the forward-kinematics Newton iteration.
inline double distal_length_sq_derivative(double p_par, const DeltaGeometry& g) {
    const double rem = g.l_m * g.l_m - p_par * p_par;
    if (rem <= 0.0) throw Error(ErrorCode::OutOfParallelogramRange, "parallelogram bound");
    return -4.0 * p_par * g.l_e / std::sqrt(rem);
}

struct LegCoefficients {
    double e, f, g;  // E cos(theta) + F sin(theta) + G = 0
    double l_d;
};

inline LegCoefficients leg_coefficients(const Vec3& p_leg, const DeltaGeometry& geom) {
    LegCoefficients c;
    c.l_d = distal_length_from_parallel(p_leg.x, geom);
    const double r_de = geom.r_de();
    c.e = 2.0 * geom.l_p * (r_de - p_leg.y);
    c.f = -2.0 * p_leg.z * geom.l_p;
    c.g = p_leg.squared_norm() + r_de * r_de + geom.l_p * geom.l_p - 2.0 * p_leg.y * r_de -
          c.l_d * c.l_d;
    return c;
}

}  // namespace detail

/// True length of leg i's distal link for a given end-effector position.
inline double distal_length(const Vec3& p_e_d, int leg, const DeltaGeometry& g) {
    return detail::distal_length_from_parallel(detail::to_leg_frame(p_e_d, leg).x, g);
}

/// Exact inverse kinematics. Per leg: rotate the target into the leg frame,
/// evaluate the configuration-dependent distal length, and solve
/// E cos(t) + F sin(t) + G = 0 by tangent half-angle substitution, keeping
/// the knee-out root (the origami knee folds only one way). That root is
/// the one whose half-angle tangent stays finite through G = E, i.e.
/// t = (-F - sqrt(E^2+F^2-G^2)) / (G - E) for in-workspace targets (F < 0).
inline JointAngles inverse_kinematics(const EndEffectorTarget& target, const DeltaGeometry& geom) {
    geom.validate();
    if (!target.is_finite())
        throw Error(ErrorCode::UnreachableTarget, "target must be finite");
    JointAngles out;
    for (int leg = 0; leg < 3; ++leg) {
        const Vec3 p_leg = detail::to_leg_frame(target, leg);
        const detail::LegCoefficients c = detail::leg_coefficients(p_leg, geom);
        const double disc = c.e * c.e + c.f * c.f - c.g * c.g;
        if (disc < 0.0)
            throw Error(ErrorCode::UnreachableTarget,
                        "no real hip angle for leg " + std::to_string(leg + 1));
        const double denom = c.g - c.e;
        if (std::abs(denom) < 1e-12)
            throw Error(ErrorCode::BranchSingularity,
                        "half-angle substitution singular for leg " + std::to_string(leg + 1));
        const double theta = 2.0 * std::atan((-c.f - std::sqrt(disc)) / denom);
        if (theta < geom.theta_min || theta > geom.theta_max)
            throw Error(ErrorCode::JointLimit, "hip angle outside servo range for leg " +
                                                   std::to_string(leg + 1));
        out[leg] = theta;
    }
    return out;
}

namespace detail {

/// Ideal-delta seed: with constant distal length the constraint is the
/// intersection of three spheres around the knee points. Eliminating the
/// quadratic terms pairwise leaves two planes; x and y become linear in z
/// and the first sphere yields a quadratic in z. The root further from the
/// base plate (larger z) is the working configuration.
inline Vec3 ideal_delta_seed(const JointAngles& angles, const DeltaGeometry& g) {
    std::array<Vec3, 3> centers;
    for (int i = 0; i < 3; ++i) {
        const double az = DeltaGeometry::leg_azimuth(i);
        const double c = std::cos(az), s = std::sin(az);
        const double y = g.r_de() + g.l_p * std::cos(angles[i]);
        const double z = g.l_p * std::sin(angles[i]);
        centers[static_cast<std::size_t>(i)] = {-s * y, c * y, z};  // Rot_z(az) * [0, y, z]
    }
    const double r = g.l_d_nominal();
    const Vec3& c1 = centers[0];
    // Plane i: 2 (c_i - c_1) . p = |c_i|^2 - |c_1|^2  (i = 2, 3)
    std::array<double, 2> ax{}, ay{}, az{}, b{};
    for (int i = 1; i < 3; ++i) {
        const Vec3 d = centers[static_cast<std::size_t>(i)] - c1;
        ax[i - 1] = 2.0 * d.x;
        ay[i - 1] = 2.0 * d.y;
        az[i - 1] = 2.0 * d.z;
        b[i - 1] = centers[static_cast<std::size_t>(i)].squared_norm() - c1.squared_norm();
    }
    const double det = ax[0] * ay[1] - ax[1] * ay[0];
    if (std::abs(det) < 1e-12)
        throw Error(ErrorCode::AmbiguousSolution, "degenerate knee placement in delta seed");
    // [x, y] = p0 + pz * z
    const double x0 = (b[0] * ay[1] - b[1] * ay[0]) / det;
    const double y0 = (ax[0] * b[1] - ax[1] * b[0]) / det;
    const double xz = (-az[0] * ay[1] + az[1] * ay[0]) / det;
    const double yz = (-ax[0] * az[1] + ax[1] * az[0]) / det;
    const double qa = xz * xz + yz * yz + 1.0;
    const double qb = 2.0 * (xz * (x0 - c1.x) + yz * (y0 - c1.y) - c1.z);
    const double qc = (x0 - c1.x) * (x0 - c1.x) + (y0 - c1.y) * (y0 - c1.y) + c1.z * c1.z -
                      r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0)
        throw Error(ErrorCode::AmbiguousSolution, "delta seed spheres do not intersect");
    const double z = (-qb + std::sqrt(disc)) / (2.0 * qa);
    if (z <= 0.0)
        throw Error(ErrorCode::AmbiguousSolution, "delta seed has no below-base intersection");
    return {x0 + xz * z, y0 + yz * z, z};
}

inline Vec3 fk_residual(const Vec3& p, const JointAngles& th, const DeltaGeometry& g) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) {
        const Vec3 q = to_leg_frame(p, i);
        const double l_d = distal_length_from_parallel(q.x, g);
        const Vec3 d{q.x, q.y - (g.r_de() + g.l_p * std::cos(th[i])),
                     q.z - g.l_p * std::sin(th[i])};
        r[i] = d.squared_norm() - l_d * l_d;
    }
    return r;
}

inline Mat3 fk_jacobian(const Vec3& p, const JointAngles& th, const DeltaGeometry& g) {
    Mat3 jac;
    for (int i = 0; i < 3; ++i) {
        const double az = DeltaGeometry::leg_azimuth(i);
        const double c = std::cos(az), s = std::sin(az);
        const Vec3 q = to_leg_frame(p, i);
        const Vec3 d{q.x, q.y - (g.r_de() + g.l_p * std::cos(th[i])),
                     q.z - g.l_p * std::sin(th[i])};
        // grad_leg = 2 d - d(l_d^2)/dx e_x, then back to frame D through
        // Rot_z(-az)^T = Rot_z(az).
        const double gx = 2.0 * d.x - distal_length_sq_derivative(q.x, g);
        const double gy = 2.0 * d.y;
        const double gz = 2.0 * d.z;
        jac(i, 0) = c * gx - s * gy;
        jac(i, 1) = s * gx + c * gy;
        jac(i, 2) = gz;
    }
    return jac;
}

}  // namespace detail

/// Numerical forward kinematics: damped Newton on the three leg constraints
/// with the configuration-dependent distal lengths, seeded from the ideal
/// delta's closed form. Converged when max |residual| < 1e-10 m^2.
inline Vec3 forward_kinematics(const JointAngles& angles, const DeltaGeometry& geom,
                               const Vec3* initial_guess = nullptr) {
    geom.validate();
    Vec3 p = initial_guess ? *initial_guess : detail::ideal_delta_seed(angles, geom);
    double res_norm = std::numeric_limits<double>::max();
    for (int it = 0; it < 100; ++it) {
        const Vec3 r = detail::fk_residual(p, angles, geom);
        res_norm = std::max(std::abs(r.x), std::max(std::abs(r.y), std::abs(r.z)));
        if (res_norm < 1e-10) return p;
        const Mat3 jac = detail::fk_jacobian(p, angles, geom);
        Vec3 step = solve3(jac, r);
        // Damping: halve the step while it worsens the residual.
        double scale = 1.0;
        for (int k = 0; k < 30; ++k) {
            const Vec3 trial = p - scale * step;
            double trial_norm;
            try {
                const Vec3 tr = detail::fk_residual(trial, angles, geom);
                trial_norm = std::max(std::abs(tr.x), std::max(std::abs(tr.y), std::abs(tr.z)));
            } catch (const Error&) {
                scale *= 0.5;
                continue;
            }
            if (trial_norm < res_norm || scale < 1e-6) {
                p = trial;
                break;
            }
            scale *= 0.5;
        }
    }
    throw Error(ErrorCode::NoConvergence, "forward kinematics Newton did not converge");
}

// ---------------------------------------------------------------------------
// Workspace sampling

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 1;
};

struct GridSpec {
    GridAxis x, y, z;
};

struct WorkspaceSample {
    Vec3 p;
    bool reachable = false;
    JointAngles angles;
    ErrorCode error = ErrorCode::UnreachableTarget;  // meaningful when unreachable
};

/// Classify a regular grid of targets. Unreachable cells record the cause.
inline std::vector<WorkspaceSample> workspace_sample(const DeltaGeometry& geom,
                                                     const GridSpec& grid) {
    geom.validate();
    auto coords = [](const GridAxis& a, int i) {
        return a.count <= 1 ? a.min : a.min + (a.max - a.min) * i / (a.count - 1);
    };
    std::vector<WorkspaceSample> out;
    out.reserve(static_cast<std::size_t>(grid.x.count) * grid.y.count * grid.z.count);
    for (int iz = 0; iz < grid.z.count; ++iz)
        for (int iy = 0; iy < grid.y.count; ++iy)
            for (int ix = 0; ix < grid.x.count; ++ix) {
                WorkspaceSample s;
                s.p = {coords(grid.x, ix), coords(grid.y, iy), coords(grid.z, iz)};
                try {
                    s.angles = inverse_kinematics(s.p, geom);
                    s.reachable = true;
                } catch (const Error& e) {
                    s.reachable = false;
                    s.error = e.code();
                }
                out.push_back(s);
            }
    return out;
}

/// First-order servo response with slew limit; tau == 0 tracks instantly.
class ServoModel {
public:
    ServoModel(double tau, double rate_limit) : tau_(tau), rate_limit_(rate_limit) {}

    void reset(const JointAngles& a) {
        state_ = a;
        primed_ = true;
    }

    JointAngles advance(const JointAngles& target, double dt) {
        if (!primed_ || tau_ <= 0.0) {
            state_ = target;
            primed_ = true;
            return state_;
        }
        for (int i = 0; i < 3; ++i) {
            double rate = (target[i] - state_[i]) / tau_;
            if (rate_limit_ > 0.0)
                rate = std::clamp(rate, -rate_limit_, rate_limit_);
            state_[i] += rate * dt;
        }
        return state_;
    }

    const JointAngles& state() const { return state_; }

private:
    double tau_;
    double rate_limit_;
    bool primed_ = false;
    JointAngles state_;
};

}  // namespace amsim
