#include <algorithm>
#include <cmath>
#include <numeric>

#include "graspkit/error.hpp"
#include "graspkit/simworld.hpp"

namespace graspkit {

std::string_view to_string(AttachOutcome o) {
  switch (o) {
    case AttachOutcome::kAttached: return "attached";
    case AttachOutcome::kMiss: return "miss";
    case AttachOutcome::kDropDuringLift: return "drop_during_lift";
    case AttachOutcome::kSensorTimeout: return "sensor_timeout";
  }
  return "?";
}

std::string_view to_string(StopCause s) {
  switch (s) {
    case StopCause::kFlowSeal: return "flow_seal";
    case StopCause::kScaleContact: return "scale_contact";
    case StopCause::kDepthReached: return "depth_reached";
    case StopCause::kTimeout: return "timeout";
  }
  return "?";
}

void SensorRig::validate() const {
  if (std::any_of(scale_reading.begin(), scale_reading.end(), [](double r) { return !(r >= 0.0); })) {
    throw Error(ErrorCode::kInvariantViolation, "scale readings must be non-negative");
  }
  if (!(contact_delta_kg > 0.0) || !(seal_threshold > 0.0)) {
    throw Error(ErrorCode::kInvariantViolation, "sensor thresholds must be positive");
  }
}

WristState flip_tool(WristState state, Tool tool) {
  if (state.active_tool != tool) {
    state.active_tool = tool;
    ++state.flip_count;
  }
  return state;
}

AttachParams AttachParams::failure_free() {
  AttachParams p;
  p.suction_base = 1.0;
  p.grip_base = 1.0;
  p.heavy_floor = 1.0;
  p.lift_drop_rate = 0.0;
  return p;
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

// Geometric seal condition of the cup on a patch; load does not matter here.
bool cup_seals(const SurfacePatch& patch, const Vec3& approach, bool porous, const AttachParams& params) {
  if (porous) return false;
  if (patch.flat_radius < params.cup_radius) return false;
  return angle_between(approach, -patch.normal) <= params.seal_angle;
}

}  // namespace

double attach_model_suction(const SuctionContact& contact, const SimObject& object, const AttachParams& params) {
  if (!cup_seals(contact.patch, contact.approach, object.porous, params)) return 0.0;
  if (contact.load_kg > params.suction_capacity_kg) return 0.0;
  const double ratio = contact.load_kg / params.suction_capacity_kg;
  double factor = 1.0;
  if (ratio > params.heavy_knee) {
    factor = 1.0 - (1.0 - params.heavy_floor) * (ratio - params.heavy_knee) / (1.0 - params.heavy_knee);
  }
  return params.suction_base * factor;
}

double attach_model_grip(const GripContact& contact, const SimObject& object, double jaw_span, double yaw,
                         const AttachParams& params) {
  const Vec3 jaw = direction_at_yaw(yaw, contact.approach);

  // Cross-section widths over jaw directions; the narrowest is the minor axis.
  constexpr int kSteps = 360;
  double min_w = std::numeric_limits<double>::infinity();
  double max_w = 0.0;
  double minor_yaw = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    const double theta = std::numbers::pi * i / kSteps;
    const double w = extent_along(object, direction_at_yaw(theta, contact.approach));
    if (w < min_w - 1e-12) {
      min_w = w;
      minor_yaw = theta;
    }
    max_w = std::max(max_w, w);
  }
  const bool round_section = max_w - min_w <= 0.05 * max_w;
  if (!round_section) {
    double mis = std::abs(wrap_half_turn(yaw) - minor_yaw);
    mis = std::min(mis, std::numbers::pi - mis);
    if (mis > params.grip_alignment_tolerance) return 0.0;
  }
  if (extent_along(object, jaw) > jaw_span) return 0.0;
  return params.grip_base;
}

namespace {

struct CandidateOutcome {
  AttachOutcome outcome = AttachOutcome::kMiss;
  StopCause stop = StopCause::kTimeout;
  LabelId contacted = 0;
};

// Whether either finger, lowered beside the contact along the jaw axis,
// strikes something other than the target before reaching grasp depth.
bool fingers_blocked(const SceneSpec& scene, const SimObject& target, const Vec3& contact, const Vec3& approach,
                     double yaw, const AttachParams& params) {
  const Vec3 jaw = direction_at_yaw(yaw, approach);
  const double half = std::min(params.jaw_span, extent_along(target, jaw)) / 2 + 0.005;
  for (double side : {-1.0, 1.0}) {
    const Vec3 finger = contact + side * half * jaw;
    const Vec3 start = finger - approach * params.standoff;
    const auto hit = raycast(scene, start, approach);
    if (!hit) continue;
    const double reach = params.standoff + params.finger_depth;
    if (hit->label != 0 && hit->label != target.label && hit->t < reach) return true;
  }
  return false;
}

CandidateOutcome execute_candidate(const GraspCandidate& cand, Tool tool, const SceneSpec& scene,
                                   const SimObject* target, SensorRig& rig, const AttachParams& params, Rng& rng) {
  CandidateOutcome out;
  const Vec3 approach = cand.approach.normalized();
  // Assumed-depth grasps have no target depth. They start a full safety
  // travel above the guess and descend until a sensor fires.
  const double lead = cand.depth_assumed ? params.safety_limit : params.standoff;
  const Vec3 start = cand.position - approach * lead;
  const auto hit = raycast(scene, start, approach);
  const double commanded = cand.depth_assumed ? params.safety_limit + params.depth_overshoot
                                              : std::min(params.safety_limit, params.standoff + params.depth_overshoot);
  const double baseline = rig.scale_reading.empty() ? 0.0 : rig.scale_reading[0];
  rig.flow = FlowState::kOpen;

  for (int step = 1;; ++step) {
    const double travel = step * params.descent_step;
    const bool touching = hit && travel >= hit->t;
    if (touching) break;
    if (travel >= commanded) {
      out.stop = cand.depth_assumed ? StopCause::kTimeout : StopCause::kDepthReached;
      out.outcome = cand.depth_assumed ? AttachOutcome::kSensorTimeout : AttachOutcome::kMiss;
      return out;
    }
  }

  // Contact: the tool presses on the surface and the bin scale registers it.
  out.contacted = hit->label;
  const SimObject* touched = hit->label ? scene.find(hit->label) : nullptr;
  if (!rig.scale_reading.empty()) rig.scale_reading[0] = baseline + params.press_force_kg;
  const bool scale_fired = !rig.scale_reading.empty() && rig.scale_reading[0] - baseline >= rig.contact_delta_kg;

  double p = 0.0;
  bool sealed = false;
  if (tool == Tool::kSuction) {
    const SurfacePatch patch =
        touched ? surface_patch(*touched, hit->point, params.cup_sag) : SurfacePatch{hit->point, Vec3::UnitZ(), 1e9};
    sealed = cup_seals(patch, approach, touched ? touched->porous : false, params);
    // Flow through the cup drops to a trickle once sealed.
    const double flow_fraction = sealed ? 0.05 : 1.0;
    rig.flow = flow_fraction < rig.seal_threshold ? FlowState::kSealed : FlowState::kOpen;
    if (touched) {
      p = attach_model_suction({patch, approach, scene.load_on(touched->label, params.clutter_mass_coupling)},
                               *touched, params);
    }
  } else if (touched && !fingers_blocked(scene, *touched, hit->point, approach, cand.yaw, params)) {
    p = attach_model_grip({hit->point, approach}, *touched, params.jaw_span, cand.yaw, params);
  }

  if (tool == Tool::kSuction && !cand.depth_assumed) {
    if (rig.flow == FlowState::kSealed) {
      out.stop = StopCause::kFlowSeal;
    } else {
      // The compliant cup is pushed to the commanded depth without sealing.
      out.stop = StopCause::kDepthReached;
      out.outcome = AttachOutcome::kMiss;
      if (!rig.scale_reading.empty()) rig.scale_reading[0] = baseline;
      return out;
    }
  } else if (scale_fired) {
    out.stop = StopCause::kScaleContact;
  } else {
    out.stop = StopCause::kTimeout;
    out.outcome = AttachOutcome::kSensorTimeout;
    if (!rig.scale_reading.empty()) rig.scale_reading[0] = baseline;
    return out;
  }
  if (!rig.scale_reading.empty()) rig.scale_reading[0] = baseline;

  const bool held = p > 0.0 && rng.uniform() < p;
  if (!held || !touched || touched != target) {
    // A different item on the tool is released and counts as a miss.
    out.outcome = AttachOutcome::kMiss;
    return out;
  }
  double drop = params.lift_drop_rate * (target->deformable ? params.deformable_drop_factor : 1.0);
  out.outcome = rng.uniform() < drop ? AttachOutcome::kDropDuringLift : AttachOutcome::kAttached;
  return out;
}

}  // namespace

AttachResult descend_and_attach(const GraspPlan& plan, const SceneSpec& scene, SensorRig& rig,
                                const WristState& wrist, const AttachParams& params, std::uint64_t seed) {
  if (plan.tool != wrist.active_tool) {
    throw Error(ErrorCode::kToolMismatch, "plan needs " + std::string(to_string(plan.tool)) + " but wrist holds " +
                                              std::string(to_string(wrist.active_tool)));
  }
  if (plan.candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "plan has no candidates");
  rig.validate();

  const SimObject* target = scene.find(plan.item);
  Rng rng(seed);
  AttachResult result;
  for (std::size_t i = 0; i < plan.candidates.size(); ++i) {
    const CandidateOutcome o = execute_candidate(plan.candidates[i], plan.tool, scene, target, rig, params, rng);
    result.outcome = o.outcome;
    result.descent_stop_cause = o.stop;
    result.contacted = o.contacted;
    result.candidate_used = i;
    if (o.outcome == AttachOutcome::kAttached || o.outcome == AttachOutcome::kDropDuringLift) break;
  }
  return result;
}

}  // namespace graspkit
