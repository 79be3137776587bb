#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "amsim/allocation.hpp"
#include "amsim/controller.hpp"
#include "amsim/coupling.hpp"
#include "amsim/delta.hpp"
#include "amsim/dynamics.hpp"
#include "amsim/interaction.hpp"
#include "amsim/io.hpp"
#include "amsim/stiffness.hpp"

namespace amsim {

namespace detail {

/// Strict JSON walker: every key must be consumed, unknown keys are errors,
/// and all diagnostics carry the full field path.
class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw Error(ErrorCode::ConfigInvalid, path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    ConfigReader object(const std::string& key) {
        mark(key);
        return ConfigReader(fetch(key), join(key));
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return require_number(key);
    }

    double require_number(const std::string& key) {
        mark(key);
        const nlohmann::json& v = fetch(key);
        if (!v.is_number())
            throw Error(ErrorCode::ConfigInvalid, join(key) + ": expected a number");
        return v.get<double>();
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        if (!has(key)) return fallback;
        mark(key);
        const nlohmann::json& v = fetch(key);
        if (!v.is_number_integer())
            throw Error(ErrorCode::ConfigInvalid, join(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        mark(key);
        const nlohmann::json& v = fetch(key);
        if (!v.is_boolean())
            throw Error(ErrorCode::ConfigInvalid, join(key) + ": expected a boolean");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        return require_string(key);
    }

    std::string require_string(const std::string& key) {
        mark(key);
        const nlohmann::json& v = fetch(key);
        if (!v.is_string())
            throw Error(ErrorCode::ConfigInvalid, join(key) + ": expected a string");
        return v.get<std::string>();
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        if (!has(key)) return fallback;
        return require_vec3(key);
    }

    Vec3 require_vec3(const std::string& key) {
        mark(key);
        const nlohmann::json& v = fetch(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
            !v[2].is_number())
            throw Error(ErrorCode::ConfigInvalid, join(key) + ": expected [x, y, z]");
        return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return require_number(key);
    }

    const nlohmann::json& raw(const std::string& key) {
        mark(key);
        return fetch(key);
    }

    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const std::string& path() const { return path_; }

    /// Call after consuming a block; rejects keys nobody asked for.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key()))
                throw Error(ErrorCode::ConfigInvalid, join(it.key()) + ": unknown key");
        }
    }

private:
    void mark(const std::string& key) { seen_.insert(key); }

    const nlohmann::json& fetch(const std::string& key) const {
        auto it = j_.find(key);
        if (it == j_.end())
            throw Error(ErrorCode::ConfigInvalid, join(key) + ": missing required key");
        return *it;
    }

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

struct RatesConfig {
    double physics_dt = 1e-3;   // s
    double controller_hz = 500.0;
    double arm_hz = 100.0;

    int controller_divisor() const { return divisor(controller_hz, "controller_hz"); }
    int arm_divisor() const { return divisor(arm_hz, "arm_hz"); }

    void validate() const {
        if (!(physics_dt > 0.0 && physics_dt <= 0.01))
            throw Error(ErrorCode::ConfigInvalid, "rates.physics_dt must be in (0, 0.01]");
        controller_divisor();
        arm_divisor();
    }

private:
    int divisor(double hz, const char* name) const {
        if (!(hz > 0.0))
            throw Error(ErrorCode::ConfigInvalid, std::string("rates.") + name + " must be positive");
        const double d = 1.0 / (physics_dt * hz);
        const double rounded = std::round(d);
        if (rounded < 1.0 || std::abs(d - rounded) > 1e-9)
            throw Error(ErrorCode::ConfigInvalid,
                        std::string("rates.") + name + " must divide the physics rate");
        return static_cast<int>(rounded);
    }
};

/// Reference trajectory source. All variants hold a constant attitude
/// reference built from yaw and pitch (roll belongs to the position loop).
struct ReferenceConfig {
    enum class Type { Hover, Step, Sinusoid, Waypoints, Ramp };

    struct Waypoint {
        Vec3 position;
        double hold = 0.0;
    };

    Type type = Type::Hover;
    Vec3 position;                 // hover; step initial value
    Vec3 step_to;                  // step target
    double t_step = 0.0;
    Vec3 center, amplitude;        // sinusoid
    double frequency_hz = 0.0;
    double phase_deg = 0.0;
    std::vector<Waypoint> waypoints;
    Vec3 ramp_from, ramp_velocity;  // ramp
    double ramp_t_start = 0.0;
    double ramp_t_end = 0.0;
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;

    RotMat attitude() const {
        return RotMat::from_rpy(0.0, pitch_deg * M_PI / 180.0, yaw_deg * M_PI / 180.0);
    }

    PoseReference at(double t) const {
        PoseReference r;
        r.R_WB_ref = attitude();
        switch (type) {
            case Type::Hover:
                r.p_ref_W = position;
                break;
            case Type::Step:
                r.p_ref_W = t < t_step ? position : step_to;
                break;
            case Type::Sinusoid: {
                const double w = 2.0 * M_PI * frequency_hz;
                const double ph = phase_deg * M_PI / 180.0;
                const double s = std::sin(w * t + ph), c = std::cos(w * t + ph);
                r.p_ref_W = center + amplitude * s;
                r.v_ref_W = amplitude * (w * c);
                r.a_ref_W = amplitude * (-w * w * s);
                break;
            }
            case Type::Waypoints: {
                double acc = 0.0;
                r.p_ref_W = waypoints.empty() ? Vec3::zero() : waypoints.back().position;
                for (const auto& wp : waypoints) {
                    acc += wp.hold;
                    if (t < acc) {
                        r.p_ref_W = wp.position;
                        break;
                    }
                }
                break;
            }
            case Type::Ramp: {
                const double tt = std::clamp(t - ramp_t_start, 0.0, ramp_t_end - ramp_t_start);
                r.p_ref_W = ramp_from + ramp_velocity * tt;
                if (t > ramp_t_start && t < ramp_t_end) r.v_ref_W = ramp_velocity;
                break;
            }
        }
        return r;
    }
};

struct DisturbanceConfig {
    bool enabled = false;
    Vec3 amplitude_N;              // world-frame sinusoidal force
    double frequency_hz = 0.0;
    std::optional<double> phase_deg;  // absent: drawn from the scenario seed
};

struct ArmConfig {
    Vec3 target{0.0, 0.0, 0.15};  // frame D
    bool compensation = true;
    double servo_tau = 0.05;       // s; 0 tracks instantly
    double servo_rate_limit = 10.0;  // rad/s
};

struct ContactConfig {
    ContactSurface surface;
    FoldThresholds thresholds;
    StiffnessSchedule schedule;
};

struct InitialState {
    Vec3 position;
    Vec3 velocity_B;
    double roll_deg = 0.0, pitch_deg = 0.0, yaw_deg = 0.0;

    RigidBodyState state() const {
        RigidBodyState s;
        s.p_W = position;
        s.v_B = velocity_B;
        s.R_WB = RotMat::from_rpy(roll_deg * M_PI / 180.0, pitch_deg * M_PI / 180.0,
                                  yaw_deg * M_PI / 180.0);
        return s;
    }
};

struct ScenarioConfig {
    double duration = 10.0;  // s
    std::uint64_t seed = 1;
    RatesConfig rates;
    double mass = 2.0;
    Vec3 inertia_diag{0.02, 0.025, 0.035};
    double gravity = 9.81;
    ControllerGains gains;
    double controller_eps_f = 1e-6;
    PlatformGeometry platform;
    double actuator_lag_tau = 0.0;
    DeltaGeometry delta;
    MountTransform mount;
    std::optional<StiffnessModel> stiffness_model;
    ReferenceConfig reference;
    DisturbanceConfig disturbance;
    ArmConfig arm;
    std::optional<ContactConfig> contact;
    InitialState initial;
    std::optional<GridSpec> workspace;  // used by the workspace subcommand
    int log_decimate = 1;
    double summary_skip_initial = 1.0;  // s

    InertialParams inertial() const {
        return InertialParams(mass, Mat3::diag(inertia_diag), gravity);
    }

    void validate() const {
        if (!(duration > 0.0)) throw Error(ErrorCode::ConfigInvalid, "duration must be positive");
        rates.validate();
        inertial();  // mass/inertia checks
        gains.validate();
        platform.validate();
        delta.validate();
        if (log_decimate < 1) throw Error(ErrorCode::ConfigInvalid, "log.decimate must be >= 1");
        if (summary_skip_initial < 0.0 || summary_skip_initial >= duration)
            throw Error(ErrorCode::ConfigInvalid, "summary.skip_initial must be in [0, duration)");
        if (contact) {
            contact->surface.validate();
            contact->thresholds.validate();
            if (contact->schedule.mode == StiffnessSchedule::Mode::FromModel && !stiffness_model)
                throw Error(ErrorCode::ConfigInvalid,
                            "contact.stiffness.mode from_model needs a stiffness block");
        }
        if (disturbance.enabled && !(disturbance.frequency_hz > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "disturbance.frequency_hz must be positive");
        // The arm reference must be a valid pose before any compensation.
        try {
            inverse_kinematics(arm.target, delta);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigInvalid,
                        std::string("arm.target: not reachable (") + error_code_name(e.code()) +
                            ")");
        }
    }
};

namespace detail {

inline ReferenceConfig parse_reference(ConfigReader r) {
    ReferenceConfig ref;
    const std::string type = r.string("type", "hover");
    ref.yaw_deg = r.number("yaw_deg", 0.0);
    ref.pitch_deg = r.number("pitch_deg", 0.0);
    if (type == "hover") {
        ref.type = ReferenceConfig::Type::Hover;
        ref.position = r.vec3("position", Vec3::zero());
    } else if (type == "step") {
        ref.type = ReferenceConfig::Type::Step;
        ref.position = r.vec3("from", Vec3::zero());
        ref.step_to = r.require_vec3("to");
        ref.t_step = r.number("t_step", 0.0);
    } else if (type == "sinusoid") {
        ref.type = ReferenceConfig::Type::Sinusoid;
        ref.center = r.vec3("center", Vec3::zero());
        ref.amplitude = r.require_vec3("amplitude");
        ref.frequency_hz = r.require_number("frequency_hz");
        ref.phase_deg = r.number("phase_deg", 0.0);
        if (!(ref.frequency_hz > 0.0))
            throw Error(ErrorCode::ConfigInvalid, r.join("frequency_hz") + ": must be positive");
    } else if (type == "waypoints") {
        ref.type = ReferenceConfig::Type::Waypoints;
        const nlohmann::json& list = r.raw("points");
        if (!list.is_array() || list.empty())
            throw Error(ErrorCode::ConfigInvalid, r.join("points") + ": expected a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            ConfigReader wr(list[i], r.join("points") + "[" + std::to_string(i) + "]");
            ReferenceConfig::Waypoint wp;
            wp.position = wr.require_vec3("position");
            wp.hold = wr.require_number("hold");
            if (!(wp.hold > 0.0))
                throw Error(ErrorCode::ConfigInvalid, wr.join("hold") + ": must be positive");
            wr.finish();
            ref.waypoints.push_back(wp);
        }
    } else if (type == "ramp") {
        ref.type = ReferenceConfig::Type::Ramp;
        ref.ramp_from = r.vec3("from", Vec3::zero());
        ref.ramp_velocity = r.require_vec3("velocity");
        ref.ramp_t_start = r.number("t_start", 0.0);
        ref.ramp_t_end = r.require_number("t_end");
        if (!(ref.ramp_t_end > ref.ramp_t_start))
            throw Error(ErrorCode::ConfigInvalid, r.join("t_end") + ": must exceed t_start");
    } else {
        throw Error(ErrorCode::ConfigInvalid,
                    r.join("type") + ": unknown reference type '" + type + "'");
    }
    r.finish();
    return ref;
}

inline StiffnessSchedule parse_schedule(ConfigReader r) {
    StiffnessSchedule s;
    const std::string mode = r.string("mode", "constant");
    if (mode == "constant") {
        s.mode = StiffnessSchedule::Mode::Constant;
        s.k_const = r.require_number("k");
    } else if (mode == "ramp") {
        s.mode = StiffnessSchedule::Mode::Ramp;
        s.k_start = r.require_number("k_start");
        s.k_end = r.require_number("k_end");
        s.t_start = r.number("t_start", 0.0);
        s.t_end = r.require_number("t_end");
        if (!(s.t_end > s.t_start))
            throw Error(ErrorCode::ConfigInvalid, r.join("t_end") + ": must exceed t_start");
    } else if (mode == "from_model") {
        s.mode = StiffnessSchedule::Mode::FromModel;
    } else {
        throw Error(ErrorCode::ConfigInvalid, r.join("mode") + ": unknown schedule mode '" + mode + "'");
    }
    r.finish();
    return s;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
    detail::ConfigReader r(j, "");
    ScenarioConfig cfg;
    cfg.duration = r.number("duration", cfg.duration);
    cfg.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    if (r.has("rates")) {
        auto rr = r.object("rates");
        cfg.rates.physics_dt = rr.number("physics_dt", cfg.rates.physics_dt);
        cfg.rates.controller_hz = rr.number("controller_hz", cfg.rates.controller_hz);
        cfg.rates.arm_hz = rr.number("arm_hz", cfg.rates.arm_hz);
        rr.finish();
    }
    if (r.has("inertial")) {
        auto ir = r.object("inertial");
        cfg.mass = ir.number("mass", cfg.mass);
        cfg.inertia_diag = ir.vec3("inertia_diag", cfg.inertia_diag);
        cfg.gravity = ir.number("gravity", cfg.gravity);
        ir.finish();
    }
    if (r.has("gains")) {
        auto gr = r.object("gains");
        cfg.gains.kp = gr.vec3("kp", cfg.gains.kp);
        cfg.gains.dp = gr.vec3("dp", cfg.gains.dp);
        cfg.gains.kr = gr.vec3("kr", cfg.gains.kr);
        cfg.gains.dw = gr.vec3("dw", cfg.gains.dw);
        cfg.controller_eps_f = gr.number("eps_f", cfg.controller_eps_f);
        gr.finish();
    }
    if (r.has("platform")) {
        auto pr = r.object("platform");
        cfg.platform.l1 = pr.number("l1", cfg.platform.l1);
        cfg.platform.l2 = pr.number("l2", cfg.platform.l2);
        cfg.platform.k_d = pr.number("k_d", cfg.platform.k_d);
        cfg.platform.k_f = pr.number("k_f", cfg.platform.k_f);
        cfg.platform.k_f_rear = pr.number("k_f_rear", cfg.platform.k_f_rear);
        cfg.platform.omega_max = pr.number("omega_max", cfg.platform.omega_max);
        cfg.actuator_lag_tau = pr.number("actuator_lag_tau", cfg.actuator_lag_tau);
        pr.finish();
    }
    if (r.has("delta")) {
        auto dr = r.object("delta");
        cfg.delta.l_p = dr.number("l_p", cfg.delta.l_p);
        cfg.delta.l_m = dr.number("l_m", cfg.delta.l_m);
        cfg.delta.l_e = dr.number("l_e", cfg.delta.l_e);
        cfg.delta.r_d = dr.number("r_d", cfg.delta.r_d);
        cfg.delta.r_e = dr.number("r_e", cfg.delta.r_e);
        cfg.delta.theta_min = dr.number("theta_min", cfg.delta.theta_min);
        cfg.delta.theta_max = dr.number("theta_max", cfg.delta.theta_max);
        dr.finish();
    }
    if (r.has("mount")) {
        auto mr = r.object("mount");
        const Vec3 rpy = mr.vec3("rpy_deg", Vec3::zero());
        cfg.mount.R_DB = RotMat::from_rpy(rpy.x * M_PI / 180.0, rpy.y * M_PI / 180.0,
                                          rpy.z * M_PI / 180.0);
        cfg.mount.p_BD_B = mr.vec3("p_bd", Vec3::zero());
        mr.finish();
    }
    if (r.has("stiffness")) {
        auto sr = r.object("stiffness");
        if (sr.has("fit_csv")) {
            const std::string path = sr.require_string("fit_csv");
            const auto samples = read_stiffness_csv(path);
            cfg.stiffness_model = fit_from_samples(samples);
        } else {
            StiffnessModel m;
            m.c0 = sr.require_number("c0");
            m.c1 = sr.require_number("c1");
            m.c2 = sr.require_number("c2");
            m.z_lo = sr.require_number("z_lo");
            m.z_hi = sr.require_number("z_hi");
            if (!(m.z_hi > m.z_lo))
                throw Error(ErrorCode::ConfigInvalid, sr.join("z_hi") + ": must exceed z_lo");
            if (!m.positive_over_range())
                throw Error(ErrorCode::ConfigInvalid,
                            sr.path() + ": stiffness must stay positive over [z_lo, z_hi]");
            cfg.stiffness_model = m;
        }
        sr.finish();
    }
    if (r.has("reference")) cfg.reference = detail::parse_reference(r.object("reference"));
    if (r.has("disturbance")) {
        auto dr = r.object("disturbance");
        cfg.disturbance.enabled = true;
        cfg.disturbance.amplitude_N = dr.require_vec3("amplitude");
        cfg.disturbance.frequency_hz = dr.require_number("frequency_hz");
        cfg.disturbance.phase_deg = dr.optional_number("phase_deg");
        dr.finish();
    }
    if (r.has("arm")) {
        auto ar = r.object("arm");
        cfg.arm.target = ar.vec3("target", cfg.arm.target);
        cfg.arm.compensation = ar.boolean("compensation", cfg.arm.compensation);
        cfg.arm.servo_tau = ar.number("servo_tau", cfg.arm.servo_tau);
        cfg.arm.servo_rate_limit = ar.number("servo_rate_limit", cfg.arm.servo_rate_limit);
        ar.finish();
    }
    if (r.has("contact")) {
        auto cr = r.object("contact");
        ContactConfig cc;
        auto surf = cr.object("surface");
        cc.surface.point_W = surf.require_vec3("point");
        cc.surface.normal_W = surf.require_vec3("normal");
        surf.finish();
        if (cr.has("thresholds")) {
            auto tr = cr.object("thresholds");
            cc.thresholds.f_knee = tr.number("f_knee", cc.thresholds.f_knee);
            cc.thresholds.f_ankle = tr.number("f_ankle", cc.thresholds.f_ankle);
            cc.thresholds.k_crossover = tr.number("k_crossover", cc.thresholds.k_crossover);
            cc.thresholds.no_fold_band = tr.number("no_fold_band", cc.thresholds.no_fold_band);
            tr.finish();
        }
        cc.schedule = detail::parse_schedule(cr.object("stiffness"));
        cr.finish();
        cfg.contact = cc;
    }
    if (r.has("initial")) {
        auto ir = r.object("initial");
        cfg.initial.position = ir.vec3("position", Vec3::zero());
        cfg.initial.velocity_B = ir.vec3("velocity", Vec3::zero());
        cfg.initial.roll_deg = ir.number("roll_deg", 0.0);
        cfg.initial.pitch_deg = ir.number("pitch_deg", 0.0);
        cfg.initial.yaw_deg = ir.number("yaw_deg", 0.0);
        ir.finish();
    }
    if (r.has("workspace")) {
        auto wr = r.object("workspace");
        GridSpec grid;
        auto axis = [&](const char* name) {
            auto ar = wr.object(name);
            GridAxis a;
            a.min = ar.require_number("min");
            a.max = ar.require_number("max");
            a.count = static_cast<int>(ar.integer("count", 1));
            if (a.count < 1 || a.max < a.min)
                throw Error(ErrorCode::ConfigInvalid, ar.path() + ": bad grid axis");
            ar.finish();
            return a;
        };
        grid.x = axis("x");
        grid.y = axis("y");
        grid.z = axis("z");
        wr.finish();
        cfg.workspace = grid;
    }
    if (r.has("log")) {
        auto lr = r.object("log");
        cfg.log_decimate = static_cast<int>(lr.integer("decimate", 1));
        lr.finish();
    }
    if (r.has("summary")) {
        auto sr = r.object("summary");
        cfg.summary_skip_initial = sr.number("skip_initial", cfg.summary_skip_initial);
        sr.finish();
    }
    r.finish();
    cfg.validate();
    return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("JSON parse error: ") + e.what());
    }
    return parse_scenario(j);
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario_text(text);
}

}  // namespace amsim
