#pragma once

#include "phaseforge/engine.hpp"
#include "phaseforge/family.hpp"

#include "json.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phaseforge {

// Cross-window classification of one radius.
enum class RadiusClass { Zero, FiniteStable, WindowGrowing };

std::string radius_class_name(RadiusClass cls);

struct WindowEvidence {
  std::int64_t window = 0;
  std::vector<std::int64_t> counts;  // per radius 0..cap
  StabilizationCertificate certificate;
  LengthTable table;  // certified table (in-memory evidence, not serialized)
};

struct TransitionReport {
  GroupSpec spec;
  int r = 0;
  bool finite = false;           // false = WindowGrowing
  std::int64_t s = 0;            // sphere count at r when finite
  std::vector<GroupElement> transition_set;  // within the largest window
  int cap = 0;
  std::vector<WindowEvidence> evidence;
};

nlohmann::ordered_json transition_report_to_json(const TransitionReport& report);
std::string transition_report_to_text(const TransitionReport& report);

// r is the largest radius with a nonempty certified sphere in the largest
// window; the sphere count at r must be identical across windows (finite
// transition) or strictly increasing (window-growing). Anything else, or a
// zero count followed by a positive one, raises ConsistencyViolation.
TransitionReport detect_transition(const GeneratorFamily& family,
                                   const std::vector<std::int64_t>& windows, int cap,
                                   const StabilizeOptions& stab = {});

// ─── Expected transition sets ────────────────────────────────────────────
//
// Expected sets are rules evaluated per window, so one rule serves every
// window size.

struct SetRule {
  enum class Type {
    WSymmetric,      // W u (-W) inside Z
    TorsionBall,     // {(k, 1) : |k| <= t-1} inside Z x (Z/2Z)
    AllNonzero,      // all-nonzero-coordinate lattice points
    ProductPair,     // left-rule x right-rule under the product embedding
    MaxUnion,        // left-rule on x1 or right-rule on x2 (product_max sets)
    ExplicitSet,
  };
  Type type = Type::ExplicitSet;
  std::vector<std::int64_t> W;
  std::int64_t t = 0;
  std::shared_ptr<const SetRule> left, right;
  GroupSpec left_spec, right_spec;  // ProductPair / MaxUnion component specs
  std::vector<GroupElement> elements;

  static SetRule w_symmetric(std::vector<std::int64_t> W);
  static SetRule torsion_ball(std::int64_t t);
  static SetRule all_nonzero();
  static SetRule product_pair(const GroupSpec& ls, SetRule l, const GroupSpec& rs, SetRule r);
  static SetRule max_union(const GroupSpec& ls, SetRule l, const GroupSpec& rs, SetRule r);
  static SetRule explicit_set(std::vector<GroupElement> elements);
};

std::vector<GroupElement> evaluate_rule(const SetRule& rule, const GroupSpec& spec,
                                        const ObservationWindow& window);

nlohmann::ordered_json rule_to_json(const SetRule& rule, const GroupSpec& spec);
SetRule rule_from_json(const nlohmann::json& j, const GroupSpec& spec);

struct Expectation {
  int r = 0;
  std::optional<std::int64_t> s;  // nullopt = WindowGrowing
  SetRule rule;
  bool check_set = true;
};

struct VerificationReport {
  bool pass = false;
  std::vector<std::string> mismatches;  // deterministic diagnostics
  TransitionReport detected;
};

nlohmann::ordered_json verification_report_to_json(const VerificationReport& report);
std::string verification_report_to_text(const VerificationReport& report);

// PASS iff detect_transition matches the expected r and s classification and
// the transition set inside every window equals the rule on that window.
VerificationReport verify_construction(const GeneratorFamily& family, const Expectation& expected,
                                       const std::vector<std::int64_t>& windows, int cap,
                                       const StabilizeOptions& stab = {});

// |{a in A : 0 < a <= t}| for families over Z.
std::int64_t counting_function(const GeneratorFamily& family, std::int64_t t);

struct ProfileRow {
  int radius = 0;
  std::int64_t window = 0;
  std::int64_t count = 0;
  RadiusClass cls = RadiusClass::Zero;
};

std::vector<ProfileRow> growth_profile(const GeneratorFamily& family,
                                       const std::vector<std::int64_t>& windows, int cap,
                                       const StabilizeOptions& stab = {});

std::string profile_to_csv(const std::vector<ProfileRow>& rows);

// Any transition set of odd finite size must contain an involution.
bool transition_set_has_involution(const GroupSpec& spec, const std::vector<GroupElement>& set);

}  // namespace phaseforge
