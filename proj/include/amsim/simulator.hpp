#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amsim/allocation.hpp"
#include "amsim/controller.hpp"
#include "amsim/coupling.hpp"
#include "amsim/delta.hpp"
#include "amsim/interaction.hpp"
#include "amsim/io.hpp"
#include "amsim/scenario.hpp"
#include "amsim/synthetic.hpp"

namespace amsim {

/// One CSV row; written every log_decimate-th physics step in exactly this
/// field order.
struct LogRecord {
    double t = 0.0;
    Vec3 p_W;
    Quat q_WB;  // wxyz
    Vec3 v_B;
    Vec3 w_B;
    Vec3 f_c;
    Vec3 tau_c;
    ActuatorCommand actuator;
    JointAngles theta;
    Vec3 p_E_D;
    Vec3 p_E_W;
    double e_p_norm = 0.0;
    Vec3 contact_force;  // on the arm tip, world frame
    double k_s = 0.0;
    int fold = 0;  // 0 none, 1 knee, 2 ankle (latched)
    bool saturated = false;
};

inline const char* log_csv_header() {
    return "t,p_x,p_y,p_z,q_w,q_x,q_y,q_z,v_x,v_y,v_z,w_x,w_y,w_z,"
           "fc_x,fc_y,fc_z,tau_x,tau_y,tau_z,"
           "t12,t34,t5,alpha0,alpha1,omega1,omega2,omega3,omega4,omega5,"
           "theta1,theta2,theta3,pe_d_x,pe_d_y,pe_d_z,pe_w_x,pe_w_y,pe_w_z,"
           "e_p_norm,force_x,force_y,force_z,k_s,fold,saturated";
}

inline void write_log_record(std::ostream& out, const LogRecord& r) {
    auto f = [](double v) { return format_double(v); };
    out << f(r.t) << ',' << f(r.p_W.x) << ',' << f(r.p_W.y) << ',' << f(r.p_W.z) << ','
        << f(r.q_WB.w) << ',' << f(r.q_WB.x) << ',' << f(r.q_WB.y) << ',' << f(r.q_WB.z) << ','
        << f(r.v_B.x) << ',' << f(r.v_B.y) << ',' << f(r.v_B.z) << ','
        << f(r.w_B.x) << ',' << f(r.w_B.y) << ',' << f(r.w_B.z) << ','
        << f(r.f_c.x) << ',' << f(r.f_c.y) << ',' << f(r.f_c.z) << ','
        << f(r.tau_c.x) << ',' << f(r.tau_c.y) << ',' << f(r.tau_c.z) << ','
        << f(r.actuator.t12) << ',' << f(r.actuator.t34) << ',' << f(r.actuator.t5) << ','
        << f(r.actuator.alpha0) << ',' << f(r.actuator.alpha1);
    for (double w : r.actuator.omega) out << ',' << f(w);
    out << ',' << f(r.theta[0]) << ',' << f(r.theta[1]) << ',' << f(r.theta[2]) << ','
        << f(r.p_E_D.x) << ',' << f(r.p_E_D.y) << ',' << f(r.p_E_D.z) << ','
        << f(r.p_E_W.x) << ',' << f(r.p_E_W.y) << ',' << f(r.p_E_W.z) << ','
        << f(r.e_p_norm) << ','
        << f(r.contact_force.x) << ',' << f(r.contact_force.y) << ',' << f(r.contact_force.z)
        << ',' << f(r.k_s) << ',' << r.fold << ',' << (r.saturated ? 1 : 0) << '\n';
}

struct RunSummary {
    double duration = 0.0;
    std::size_t steps = 0;
    double final_base_error = 0.0;     // |p_ref - p| at the last step
    double median_base_error = 0.0;
    double median_ee_error = 0.0;      // end-effector vs its reference pose
    double iqr_ee_error = 0.0;
    std::vector<FoldEvent> folds;
    std::size_t saturated_steps = 0;
    bool aborted = false;
    std::string abort_code;

    void print(std::ostream& out) const {
        out << "steps=" << steps << '\n'
            << "duration=" << format_double(duration) << '\n'
            << "final_base_error=" << format_double(final_base_error) << '\n'
            << "median_base_error=" << format_double(median_base_error) << '\n'
            << "median_ee_error=" << format_double(median_ee_error) << '\n'
            << "iqr_ee_error=" << format_double(iqr_ee_error) << '\n'
            << "saturated_steps=" << saturated_steps << '\n'
            << "fold_events=" << folds.size() << '\n';
        for (const auto& e : folds)
            out << "fold=" << fold_kind_name(e.kind) << " t=" << format_double(e.time)
                << " force=" << format_double(e.force_at_fold)
                << " k_s=" << format_double(e.stiffness) << '\n';
        if (aborted) out << "aborted=" << abort_code << '\n';
    }
};

namespace detail {

inline double percentile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

/// Closed-loop executive. Per physics tick, in fixed order: sense, control
/// (zero-order-held at the controller rate), allocate, couple + arm IK (at
/// the arm rate), servo and contact update, integrate. Deterministic for a
/// given config and seed.
class Simulator {
public:
    explicit Simulator(const ScenarioConfig& cfg)
        : cfg_(cfg),
          inertial_(cfg.inertial()),
          controller_(cfg.gains, cfg.controller_eps_f),
          allocator_(cfg.platform),
          lag_(cfg.actuator_lag_tau),
          servo_(cfg.arm.servo_tau, cfg.arm.servo_rate_limit) {
        cfg_.validate();
    }

    /// Runs the scenario; streams CSV rows into `csv` when non-null. On a
    /// runtime domain error the log written so far is kept and the summary
    /// reports the abort code.
    RunSummary run(std::ostream* csv = nullptr) {
        const double dt = cfg_.rates.physics_dt;
        const int ctrl_div = cfg_.rates.controller_divisor();
        const int arm_div = cfg_.rates.arm_divisor();
        const std::size_t n_steps = static_cast<std::size_t>(std::llround(cfg_.duration / dt));

        SeededGaussian rng(cfg_.seed);
        double dist_phase = 0.0;
        if (cfg_.disturbance.enabled)
            dist_phase = cfg_.disturbance.phase_deg
                             ? *cfg_.disturbance.phase_deg * M_PI / 180.0
                             : rng.uniform01() * 2.0 * M_PI;

        RigidBodyState state = cfg_.initial.state();
        PoseController::Output ctrl{};
        ActuatorCommand act_cmd;
        JointAngles theta_target{};
        Vec3 arm_target_d = cfg_.arm.target;
        const Vec3 comp_ref = compensation_reference(cfg_.arm.target, cfg_.mount);
        Vec3 fk_guess = cfg_.arm.target;
        std::optional<FoldEvent> fold;

        const StiffnessModel* model = cfg_.stiffness_model ? &*cfg_.stiffness_model : nullptr;

        RunSummary sum;
        sum.duration = cfg_.duration;
        std::vector<double> ee_errors, base_errors;
        ee_errors.reserve(n_steps);
        base_errors.reserve(n_steps);

        if (csv) *csv << log_csv_header() << '\n';

        try {
            for (std::size_t n = 0; n < n_steps; ++n) {
                const double t = static_cast<double>(n) * dt;
                const PoseReference ref = cfg_.reference.at(t);

                if (n % static_cast<std::size_t>(ctrl_div) == 0) {
                    ctrl = controller_.update(state, ref, inertial_);
                    act_cmd = allocator_.allocate(ctrl.wrench);  // f_y dropped here
                }
                const ActuatorCommand act = lag_.advance(act_cmd, dt);

                if (n % static_cast<std::size_t>(arm_div) == 0) {
                    arm_target_d = cfg_.arm.compensation
                                       ? compensate(comp_ref, ctrl.position.e_p_B, state.R_WB,
                                                    ref.R_WB_ref, cfg_.mount)
                                       : cfg_.arm.target;
                    theta_target = inverse_kinematics(arm_target_d, cfg_.delta);
                }
                const JointAngles theta = servo_.advance(theta_target, dt);
                const Vec3 p_e_d = forward_kinematics(theta, cfg_.delta, &fk_guess);
                fk_guess = p_e_d;
                const Vec3 p_e_w = end_effector_world(state, cfg_.mount, p_e_d);

                double k_s = 0.0;
                Vec3 tip_force_W;
                if (cfg_.contact) {
                    k_s = cfg_.contact->schedule.value(t, model, arm_target_d.z);
                    if (!fold) {
                        const Vec3 f_env =
                            contact_force_on_environment(p_e_w, cfg_.contact->surface, k_s);
                        tip_force_W = -f_env;
                        fold = detect_fold(tip_force_W.norm(), k_s, cfg_.contact->thresholds, t);
                        if (fold) sum.folds.push_back(*fold);
                    }
                    if (fold) tip_force_W = Vec3::zero();  // folded arm carries no load
                }

                WrenchCommand applied = apply_actuators(act, cfg_.platform);
                if (cfg_.contact) {
                    const WrenchCommand cw =
                        contact_wrench_on_body(tip_force_W, state, cfg_.mount, p_e_d);
                    applied.force += cw.force;
                    applied.torque += cw.torque;
                }
                if (cfg_.disturbance.enabled) {
                    const Vec3 f_dist_W =
                        cfg_.disturbance.amplitude_N *
                        std::sin(2.0 * M_PI * cfg_.disturbance.frequency_hz * t + dist_phase);
                    applied.force += state.R_WB.inverse_rotate(f_dist_W);
                }

                const double base_err = (ref.p_ref_W - state.p_W).norm();
                const Vec3 ee_ref_w =
                    ref.p_ref_W + ref.R_WB_ref * end_effector_body(cfg_.mount, cfg_.arm.target);
                if (t >= cfg_.summary_skip_initial) {
                    base_errors.push_back(base_err);
                    ee_errors.push_back((p_e_w - ee_ref_w).norm());
                }
                if (act.saturated) ++sum.saturated_steps;
                sum.final_base_error = base_err;

                if (csv && n % static_cast<std::size_t>(cfg_.log_decimate) == 0) {
                    LogRecord rec;
                    rec.t = t;
                    rec.p_W = state.p_W;
                    rec.q_WB = to_quaternion(state.R_WB);
                    rec.v_B = state.v_B;
                    rec.w_B = state.w_B;
                    rec.f_c = ctrl.wrench.force;
                    rec.tau_c = ctrl.wrench.torque;
                    rec.actuator = act;
                    rec.theta = theta;
                    rec.p_E_D = p_e_d;
                    rec.p_E_W = p_e_w;
                    rec.e_p_norm = base_err;
                    rec.contact_force = tip_force_W;
                    rec.k_s = k_s;
                    rec.fold = fold ? (fold->kind == FoldKind::KneeFold ? 1 : 2) : 0;
                    rec.saturated = act.saturated;
                    write_log_record(*csv, rec);
                }

                state = step(state, inertial_, applied, dt);
                ++sum.steps;
            }
        } catch (const Error& e) {
            if (csv) csv->flush();
            sum.aborted = true;
            sum.abort_code = error_code_name(e.code());
        }

        std::sort(base_errors.begin(), base_errors.end());
        std::sort(ee_errors.begin(), ee_errors.end());
        sum.median_base_error = detail::percentile_sorted(base_errors, 0.5);
        sum.median_ee_error = detail::percentile_sorted(ee_errors, 0.5);
        sum.iqr_ee_error = detail::percentile_sorted(ee_errors, 0.75) -
                           detail::percentile_sorted(ee_errors, 0.25);
        if (csv) csv->flush();
        return sum;
    }

private:
    ScenarioConfig cfg_;
    InertialParams inertial_;
    PoseController controller_;
    Allocator allocator_;
    ActuatorLag lag_;
    ServoModel servo_;
};

inline RunSummary run_scenario(const ScenarioConfig& cfg, std::ostream* csv = nullptr) {
    Simulator sim(cfg);
    return sim.run(csv);
}

}  // namespace amsim
