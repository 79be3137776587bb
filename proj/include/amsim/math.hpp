#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "amsim/errors.hpp"

namespace amsim {

/// Coordinate frame tags used throughout the library. World and Body follow
/// the North-East-Down convention (gravity along +z of World). DeltaBase is
/// fixed to the arm's base plate with +z pointing into the arm workspace;
/// EndEffector is attached to the moving plate. Vector-valued quantities
/// carry their frame in the name (_W, _B, _D, _E).
enum class Frame { World, Body, DeltaBase, EndEffector };

// ---------------------------------------------------------------------------
// Vec3

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Vec3 zero() { return {0.0, 0.0, 0.0}; }
    static Vec3 unit_x() { return {1.0, 0.0, 0.0}; }
    static Vec3 unit_y() { return {0.0, 1.0, 0.0}; }
    static Vec3 unit_z() { return {0.0, 0.0, 1.0}; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    Vec3 normalized() const { return *this / norm(); }

    /// Component-wise product; used to apply diagonal gain matrices.
    Vec3 cwise(const Vec3& o) const { return {x * o.x, y * o.y, z * o.z}; }

    bool is_finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// ---------------------------------------------------------------------------
// Mat3: plain 3x3 matrix, row-major.

struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 zero() { return {}; }
    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }
    static Mat3 diag(const Vec3& d) {
        Mat3 r;
        r(0, 0) = d.x;
        r(1, 1) = d.y;
        r(2, 2) = d.z;
        return r;
    }
    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 r;
        r.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
        return r;
    }
    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 r;
        r.m = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
        return r;
    }

    double operator()(int i, int j) const { return m[3 * i + j]; }
    double& operator()(int i, int j) { return m[3 * i + j]; }

    Vec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }
    Vec3 col(int j) const { return {m[j], m[3 + j], m[6 + j]}; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }
    Vec3 operator*(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    /// Largest absolute entry; used for drift/skewness checks.
    double max_abs() const {
        double r = 0.0;
        for (double v : m) r = std::max(r, std::abs(v));
        return r;
    }

    bool is_finite() const {
        for (double v : m)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline Mat3 operator*(double s, const Mat3& a) { return a * s; }

/// Inverse by adjugate; throws SingularMatrix when |det| < 1e-12.
inline Mat3 inverse(const Mat3& a) {
    const double d = a.det();
    if (std::abs(d) < 1e-12) throw Error(ErrorCode::SingularMatrix, "3x3 inverse");
    Mat3 r;
    r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
    r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
    r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
    r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
    r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
    r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
    r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
    r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
    r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
    return r;
}

// ---------------------------------------------------------------------------
// skew / vee

/// skew(v) * w == v x w for all w; the result is antisymmetric.
inline Mat3 skew(const Vec3& v) {
    Mat3 s;
    s.m = {0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0};
    return s;
}

/// Inverse of skew. Requires max|S + S^T| < 1e-9.
inline Vec3 vee(const Mat3& s) {
    if ((s + s.transpose()).max_abs() >= 1e-9)
        throw Error(ErrorCode::NotSkewSymmetric, "vee of a non-skew matrix");
    return {s(2, 1), s(0, 2), s(1, 0)};
}

// ---------------------------------------------------------------------------
// RotMat: SO(3) element, validated on construction.

class RotMat {
public:
    RotMat() : m_(Mat3::identity()) {}

    static RotMat identity() { return RotMat(); }

    /// Validates orthonormality and det=+1 to 1e-9.
    static RotMat from_matrix(const Mat3& m) {
        RotMat r(m, true);
        return r;
    }

    /// For integrator internals: accepts the matrix as-is.
    static RotMat from_matrix_unchecked(const Mat3& m) { return RotMat(m, false); }

    static RotMat from_columns(const Vec3& x, const Vec3& y, const Vec3& z) {
        return from_matrix(Mat3::from_columns(x, y, z));
    }

    static RotMat from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 a = axis.normalized();
        const double c = std::cos(angle), s = std::sin(angle);
        const Mat3 k = skew(a);
        Mat3 m = Mat3::identity() + s * k + (1.0 - c) * (k * k);
        return RotMat(m, false);
    }

    static RotMat rot_x(double a) { return from_axis_angle(Vec3::unit_x(), a); }
    static RotMat rot_y(double a) { return from_axis_angle(Vec3::unit_y(), a); }
    static RotMat rot_z(double a) { return from_axis_angle(Vec3::unit_z(), a); }

    /// Z-Y-X intrinsic Euler composition (yaw about z, then pitch, then roll).
    static RotMat from_rpy(double roll, double pitch, double yaw) {
        return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
    }

    const Mat3& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    Vec3 col(int j) const { return m_.col(j); }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    RotMat operator*(const RotMat& o) const { return RotMat(m_ * o.m_, false); }
    RotMat transpose() const { return RotMat(m_.transpose(), false); }

    /// Rotate a world-frame vector into this rotation's source frame
    /// (for R_WB: world -> body).
    Vec3 inverse_rotate(const Vec3& v) const { return m_.transpose() * v; }

    /// max|R^T R - I|.
    double orthonormality_error() const {
        return (m_.transpose() * m_ - Mat3::identity()).max_abs();
    }

    bool is_finite() const { return m_.is_finite(); }

    /// Projects back onto SO(3) with the Newton iteration for the orthogonal
    /// polar factor, X <- (X + X^-T)/2. Quadratic convergence for small drift.
    RotMat renormalized() const {
        Mat3 x = m_;
        for (int it = 0; it < 20; ++it) {
            const Mat3 next = (x + inverse(x).transpose()) * 0.5;
            x = next;
            if ((x.transpose() * x - Mat3::identity()).max_abs() < 1e-15) break;
        }
        return RotMat(x, false);
    }

private:
    RotMat(const Mat3& m, bool validate) : m_(m) {
        if (validate) {
            if (orthonormality_error() >= 1e-9 || std::abs(m_.det() - 1.0) >= 1e-9)
                throw Error(ErrorCode::NotRotation, "matrix is not in SO(3) within 1e-9");
        }
    }

    Mat3 m_;
};

// ---------------------------------------------------------------------------
// Quaternion bridge (log/CSV boundary only; internal math stays in matrices).

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline Quat to_quaternion(const RotMat& rot) {
    const Mat3& r = rot.matrix();
    Quat q;
    const double tr = r(0, 0) + r(1, 1) + r(2, 2);
    if (tr > 0.0) {
        double s = std::sqrt(tr + 1.0) * 2.0;
        q.w = 0.25 * s;
        q.x = (r(2, 1) - r(1, 2)) / s;
        q.y = (r(0, 2) - r(2, 0)) / s;
        q.z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q.w = (r(2, 1) - r(1, 2)) / s;
        q.x = 0.25 * s;
        q.y = (r(0, 1) + r(1, 0)) / s;
        q.z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q.w = (r(0, 2) - r(2, 0)) / s;
        q.x = (r(0, 1) + r(1, 0)) / s;
        q.y = 0.25 * s;
        q.z = (r(1, 2) + r(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q.w = (r(1, 0) - r(0, 1)) / s;
        q.x = (r(0, 2) + r(2, 0)) / s;
        q.y = (r(1, 2) + r(2, 1)) / s;
        q.z = 0.25 * s;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Fixed-size dense solve, LU with partial pivoting. N stays tiny (3 or 5);
// no pivot growth concerns beyond the explicit singularity threshold.

template <std::size_t N>
struct MatN {
    std::array<double, N * N> m{};

    static MatN identity() {
        MatN r;
        for (std::size_t i = 0; i < N; ++i) r(i, i) = 1.0;
        return r;
    }

    double operator()(std::size_t i, std::size_t j) const { return m[N * i + j]; }
    double& operator()(std::size_t i, std::size_t j) { return m[N * i + j]; }

    template <typename VecT>
    VecT multiply(const VecT& v) const {
        VecT r{};
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < N; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }
};

template <std::size_t N>
using VecN = std::array<double, N>;

namespace detail {

/// In-place LU factorization with row pivoting; perm holds the row order.
/// Throws SingularMatrix when a pivot falls below 1e-12 in magnitude.
template <std::size_t N>
void lu_factor(MatN<N>& a, std::array<std::size_t, N>& perm) {
    for (std::size_t i = 0; i < N; ++i) perm[i] = i;
    for (std::size_t k = 0; k < N; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(perm[k], k));
        for (std::size_t i = k + 1; i < N; ++i) {
            const double v = std::abs(a(perm[i], k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < 1e-12) throw Error(ErrorCode::SingularMatrix, "pivot below 1e-12 in LU");
        std::swap(perm[k], perm[piv]);
        const double pivot = a(perm[k], k);
        for (std::size_t i = k + 1; i < N; ++i) {
            const double f = a(perm[i], k) / pivot;
            a(perm[i], k) = f;
            for (std::size_t j = k + 1; j < N; ++j) a(perm[i], j) -= f * a(perm[k], j);
        }
    }
}

template <std::size_t N>
VecN<N> lu_solve_factored(const MatN<N>& lu, const std::array<std::size_t, N>& perm,
                          const VecN<N>& b) {
    VecN<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
        double s = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu(perm[i], j) * y[j];
        y[i] = s;
    }
    VecN<N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = y[i];
        for (std::size_t j = i + 1; j < N; ++j) s -= lu(perm[i], j) * x[j];
        x[i] = s / lu(perm[i], i);
    }
    return x;
}

}  // namespace detail

template <std::size_t N>
VecN<N> lu_solve(MatN<N> a, const VecN<N>& b) {
    std::array<std::size_t, N> perm;
    detail::lu_factor(a, perm);
    return detail::lu_solve_factored(a, perm, b);
}

using Mat5 = MatN<5>;
using Vec5 = VecN<5>;

/// Solve A x = b for the 5x5 systems of the actuator allocation.
inline Vec5 solve5(const Mat5& a, const Vec5& b) { return lu_solve<5>(a, b); }

/// Same LU path for 3x3 systems (forward-kinematics Newton steps, fits).
inline Vec3 solve3(const Mat3& a, const Vec3& b) {
    MatN<3> an;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) an(i, j) = a(i, j);
    const VecN<3> x = lu_solve<3>(an, VecN<3>{b.x, b.y, b.z});
    return {x[0], x[1], x[2]};
}

}  // namespace amsim
