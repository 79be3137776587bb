#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "amsim/errors.hpp"

namespace amsim {

/// Height-dependent axial stiffness of the arm: k_s(z) = c0 + c1 z + c2 z^2,
/// valid over the hull of the characterization heights. Evaluation outside
/// the hull clamps to the nearest edge and reports it.
struct StiffnessModel {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double z_lo = 0.0;
    double z_hi = 0.0;

    double eval_raw(double z) const { return c0 + z * (c1 + z * c2); }

    /// k_s at the minimum over the valid range (interior vertex included).
    double min_over_range() const {
        double lo = std::min(eval_raw(z_lo), eval_raw(z_hi));
        if (c2 > 0.0) {
            const double zv = -c1 / (2.0 * c2);
            if (zv > z_lo && zv < z_hi) lo = std::min(lo, eval_raw(zv));
        }
        return lo;
    }

    bool positive_over_range() const { return min_over_range() > 0.0; }
};

/// One characterization row: arm held at height z, plate pressed down by
/// delta_z, push force f_z recorded.
struct StiffnessSample {
    double z = 0.0;       // m
    double delta_z = 0.0; // m
    double f_z = 0.0;     // N
};

struct HeightStiffness {
    double z = 0.0;
    double k = 0.0;  // N/m
};

/// Through-origin least squares F = k * delta over samples taken at one
/// height: k = sum(F d) / sum(d^2). F(0) = 0 is physical, so no intercept.
inline double fit_linear_spring(std::span<const StiffnessSample> samples) {
    if (samples.size() < 2)
        throw Error(ErrorCode::DegenerateData, "spring fit needs at least two samples");
    double sfd = 0.0, sdd = 0.0;
    for (const auto& s : samples) {
        sfd += s.f_z * s.delta_z;
        sdd += s.delta_z * s.delta_z;
    }
    if (sdd < 1e-12)
        throw Error(ErrorCode::DegenerateData, "spring fit needs nonzero displacements");
    return sfd / sdd;
}

namespace detail {

/// Least-squares quadratic through (z, k) points by Householder QR on the
/// Vandermonde matrix; rank checked on the R diagonal.
inline StiffnessModel polyfit_quadratic(std::span<const HeightStiffness> pts) {
    const std::size_t m = pts.size();
    std::vector<double> a(m * 3);
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i * 3 + 0] = 1.0;
        a[i * 3 + 1] = pts[i].z;
        a[i * 3 + 2] = pts[i].z * pts[i].z;
        b[i] = pts[i].k;
    }
    for (std::size_t k = 0; k < 3; ++k) {
        double nx = 0.0;
        for (std::size_t i = k; i < m; ++i) nx += a[i * 3 + k] * a[i * 3 + k];
        nx = std::sqrt(nx);
        if (nx < 1e-12) throw Error(ErrorCode::DegenerateData, "rank-deficient polynomial fit");
        const double alpha = a[k * 3 + k] >= 0.0 ? -nx : nx;
        std::vector<double> v(m - k);
        v[0] = a[k * 3 + k] - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a[i * 3 + k];
        double vn = 0.0;
        for (double x : v) vn += x * x;
        vn = std::sqrt(vn);
        if (vn > 1e-300) {
            for (double& x : v) x /= vn;
            for (std::size_t j = k; j < 3; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a[i * 3 + j];
                for (std::size_t i = k; i < m; ++i) a[i * 3 + j] -= 2.0 * v[i - k] * dot;
            }
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
            for (std::size_t i = k; i < m; ++i) b[i] -= 2.0 * v[i - k] * dot;
        }
    }
    StiffnessModel model;
    double c[3];
    for (int i = 2; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < 3; ++j) s -= a[static_cast<std::size_t>(i) * 3 + j] * c[j];
        const double diag = a[static_cast<std::size_t>(i) * 3 + i];
        if (std::abs(diag) < 1e-12)
            throw Error(ErrorCode::DegenerateData, "rank-deficient polynomial fit");
        c[i] = s / diag;
    }
    model.c0 = c[0];
    model.c1 = c[1];
    model.c2 = c[2];
    return model;
}

}  // namespace detail

/// Quadratic stiffness-over-height fit. Needs three distinct heights; the
/// valid range is the hull of the inputs.
inline StiffnessModel fit_polynomial(std::span<const HeightStiffness> pts) {
    std::vector<double> zs;
    for (const auto& p : pts) zs.push_back(p.z);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    if (zs.size() < 3)
        throw Error(ErrorCode::DegenerateData, "polynomial fit needs three distinct heights");
    StiffnessModel m = detail::polyfit_quadratic(pts);
    m.z_lo = zs.front();
    m.z_hi = zs.back();
    return m;
}

/// Groups raw samples by height, fits the per-height spring constants, then
/// the quadratic over heights. Rows of one height series must share the
/// exact z value.
inline StiffnessModel fit_from_samples(std::span<const StiffnessSample> samples) {
    std::map<double, std::vector<StiffnessSample>> by_height;
    for (const auto& s : samples) by_height[s.z].push_back(s);
    std::vector<HeightStiffness> pts;
    for (const auto& [z, group] : by_height)
        pts.push_back({z, fit_linear_spring(group)});
    return fit_polynomial(pts);
}

/// Evaluate k_s(z); out-of-range heights clamp to the hull and set the flag.
inline double stiffness_at(const StiffnessModel& m, double z, bool* clamped = nullptr) {
    double zc = z;
    bool c = false;
    if (m.z_hi > m.z_lo) {
        if (z < m.z_lo) { zc = m.z_lo; c = true; }
        if (z > m.z_hi) { zc = m.z_hi; c = true; }
    }
    if (clamped) *clamped = c;
    return m.eval_raw(zc);
}

/// Compression-only spring force along the contact normal.
inline double spring_force(const StiffnessModel& m, double z_config, double delta) {
    return stiffness_at(m, z_config) * std::max(delta, 0.0);
}

}  // namespace amsim
