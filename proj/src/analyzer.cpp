#include "phaseforge/analyzer.hpp"

#include "phaseforge/errors.hpp"
#include "phaseforge/window.hpp"

#include <algorithm>
#include <set>

namespace phaseforge {

namespace {

void validate_windows(const std::vector<std::int64_t>& windows) {
  if (windows.size() < 3) throw DomainError("at least 3 increasing windows are required");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i] < 1) throw DomainError("window bounds must be positive");
    if (i && windows[i] <= windows[i - 1]) throw DomainError("windows must be strictly increasing");
  }
}

std::vector<std::int64_t> radius_counts(const LengthTable& table) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(table.cap) + 1, 0);
  for (const auto& [elem, len] : table.entries) {
    if (!len.has_value()) {
      throw DomainError("cap " + std::to_string(table.cap) +
                        " is too small: an element exceeds it inside window " +
                        std::to_string(table.window_bound));
    }
    ++counts[static_cast<std::size_t>(*len)];
  }
  // A zero count followed by a positive one contradicts the growth shape.
  bool seen_zero = false;
  for (std::size_t q = 1; q < counts.size(); ++q) {
    if (counts[q] == 0) {
      seen_zero = true;
    } else if (seen_zero) {
      throw ConsistencyViolation("window " + std::to_string(table.window_bound) +
                                 ": zero sphere count at some radius below a positive one");
    }
  }
  return counts;
}

// Cross-window class of one radius; counts are per increasing window.
RadiusClass classify_radius(int radius, const std::vector<std::int64_t>& counts) {
  bool all_zero = true, all_equal = true, strictly_up = true;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) all_zero = false;
    if (i) {
      if (counts[i] != counts[i - 1]) all_equal = false;
      if (counts[i] <= counts[i - 1]) strictly_up = false;
      if (counts[i] < counts[i - 1]) {
        throw ConsistencyViolation("radius " + std::to_string(radius) +
                                   ": sphere count decreased as the window grew");
      }
    }
  }
  if (all_zero) return RadiusClass::Zero;
  if (all_equal) return RadiusClass::FiniteStable;
  if (strictly_up) return RadiusClass::WindowGrowing;
  throw ConsistencyViolation("radius " + std::to_string(radius) +
                             ": counts neither stable nor strictly increasing across windows; "
                             "choose larger or more separated windows");
}

struct Classified {
  std::vector<WindowEvidence> evidence;
  std::vector<RadiusClass> classes;  // per radius 0..cap
  int last_nonempty = 0;             // largest radius with a nonzero count in the largest window
};

Classified classify_family(const GeneratorFamily& family, const std::vector<std::int64_t>& windows,
                           int cap, const StabilizeOptions& stab) {
  validate_windows(windows);
  if (cap < 1) throw DomainError("cap must be positive");
  Classified out;
  for (const auto n : windows) {
    auto certified = stabilize_table(family, ObservationWindow{n}, cap, stab);
    WindowEvidence ev;
    ev.window = n;
    ev.counts = radius_counts(certified.table);
    ev.certificate = std::move(certified.certificate);
    ev.table = std::move(certified.table);
    out.evidence.push_back(std::move(ev));
  }
  const auto& top = out.evidence.back().counts;
  for (std::size_t q = 0; q < top.size(); ++q) {
    if (top[q] > 0) out.last_nonempty = static_cast<int>(q);
  }
  std::vector<std::int64_t> per_window;
  for (int q = 0; q <= cap; ++q) {
    per_window.clear();
    for (const auto& ev : out.evidence) per_window.push_back(ev.counts[static_cast<std::size_t>(q)]);
    out.classes.push_back(classify_radius(q, per_window));
  }
  // Fundamental shape: every radius below the last nonempty one must be
  // window-growing, and everything above it must be empty.
  for (int q = 1; q < out.last_nonempty; ++q) {
    if (out.classes[static_cast<std::size_t>(q)] != RadiusClass::WindowGrowing) {
      throw ConsistencyViolation("radius " + std::to_string(q) +
                                 " is not window-growing below the transition radius " +
                                 std::to_string(out.last_nonempty));
    }
  }
  for (int q = out.last_nonempty + 1; q <= cap; ++q) {
    if (out.classes[static_cast<std::size_t>(q)] != RadiusClass::Zero) {
      throw ConsistencyViolation("radius " + std::to_string(q) + " is nonempty above the transition radius");
    }
  }
  return out;
}

}  // namespace

std::string radius_class_name(RadiusClass cls) {
  switch (cls) {
    case RadiusClass::Zero: return "zero";
    case RadiusClass::FiniteStable: return "finite-stable";
    case RadiusClass::WindowGrowing: return "window-growing";
  }
  return "?";
}

TransitionReport detect_transition(const GeneratorFamily& family,
                                   const std::vector<std::int64_t>& windows, int cap,
                                   const StabilizeOptions& stab) {
  auto classified = classify_family(family, windows, cap, stab);
  TransitionReport report;
  report.spec = family.spec;
  report.cap = cap;
  report.r = classified.last_nonempty;
  if (report.r < 1) {
    throw ConsistencyViolation("no nonempty sphere of positive radius inside the largest window");
  }
  const RadiusClass cls = classified.classes[static_cast<std::size_t>(report.r)];
  if (cls == RadiusClass::FiniteStable) {
    report.finite = true;
    report.s = classified.evidence.back().counts[static_cast<std::size_t>(report.r)];
    if (report.r < 2) {
      throw ConsistencyViolation("a finite nonzero sphere count at radius 1 contradicts the growth shape");
    }
  } else {
    report.finite = false;
    report.s = 0;
  }
  for (const auto& [elem, len] : classified.evidence.back().table.entries) {
    if (len.has_value() && *len == report.r) report.transition_set.push_back(elem);
  }
  report.evidence = std::move(classified.evidence);
  return report;
}

nlohmann::ordered_json transition_report_to_json(const TransitionReport& report) {
  nlohmann::ordered_json j;
  j["r"] = report.r;
  if (report.finite) {
    j["s"] = report.s;
  } else {
    j["s"] = "window-growing";
  }
  auto set = nlohmann::ordered_json::array();
  for (const auto& x : report.transition_set) set.push_back(element_to_json(report.spec, x));
  j["transition_set"] = std::move(set);
  j["cap"] = report.cap;
  auto evs = nlohmann::ordered_json::array();
  for (const auto& ev : report.evidence) {
    nlohmann::ordered_json ej;
    ej["window"] = ev.window;
    ej["counts"] = ev.counts;
    nlohmann::ordered_json cj;
    cj["levels"] = ev.certificate.levels;
    cj["agreeing"] = ev.certificate.agreeing;
    ej["certificate"] = std::move(cj);
    evs.push_back(std::move(ej));
  }
  j["evidence"] = std::move(evs);
  return j;
}

std::string transition_report_to_text(const TransitionReport& report) {
  std::string out = "phase transition: (" + std::to_string(report.r) + ", " +
                    (report.finite ? std::to_string(report.s) : std::string("window-growing")) + ")\n";
  out += "transition set (largest window):";
  for (const auto& x : report.transition_set) out += " " + element_to_text(report.spec, x);
  out += "\n";
  for (const auto& ev : report.evidence) {
    out += "window " + std::to_string(ev.window) + " counts:";
    for (auto c : ev.counts) out += " " + std::to_string(c);
    out += " (K " + std::to_string(ev.certificate.agreeing[0]) + "," +
           std::to_string(ev.certificate.agreeing[1]) + "," + std::to_string(ev.certificate.agreeing[2]) + ")\n";
  }
  return out;
}

// ─── Set rules ───────────────────────────────────────────────────────────

SetRule SetRule::w_symmetric(std::vector<std::int64_t> W) {
  SetRule r;
  r.type = Type::WSymmetric;
  std::sort(W.begin(), W.end());
  W.erase(std::unique(W.begin(), W.end()), W.end());
  r.W = std::move(W);
  return r;
}

SetRule SetRule::torsion_ball(std::int64_t t) {
  SetRule r;
  r.type = Type::TorsionBall;
  r.t = t;
  return r;
}

SetRule SetRule::all_nonzero() {
  SetRule r;
  r.type = Type::AllNonzero;
  return r;
}

SetRule SetRule::product_pair(const GroupSpec& ls, SetRule l, const GroupSpec& rs, SetRule r) {
  SetRule out;
  out.type = Type::ProductPair;
  out.left = std::make_shared<SetRule>(std::move(l));
  out.right = std::make_shared<SetRule>(std::move(r));
  out.left_spec = ls;
  out.right_spec = rs;
  return out;
}

SetRule SetRule::max_union(const GroupSpec& ls, SetRule l, const GroupSpec& rs, SetRule r) {
  SetRule out = product_pair(ls, std::move(l), rs, std::move(r));
  out.type = Type::MaxUnion;
  return out;
}

SetRule SetRule::explicit_set(std::vector<GroupElement> elements) {
  SetRule r;
  r.type = Type::ExplicitSet;
  std::sort(elements.begin(), elements.end(), ElementLess{});
  r.elements = std::move(elements);
  return r;
}

std::vector<GroupElement> evaluate_rule(const SetRule& rule, const GroupSpec& spec,
                                        const ObservationWindow& window) {
  std::vector<GroupElement> out;
  switch (rule.type) {
    case SetRule::Type::WSymmetric: {
      if (!(spec == GroupSpec::lattice(1, 0))) throw DomainError("w_symmetric rule needs a family over Z");
      for (auto w : rule.W) {
        if (w <= window.bound) {
          GroupElement x;
          x.free.push_back(w);
          out.push_back(x);
          x.free[0] = -w;
          out.push_back(x);
        }
      }
      break;
    }
    case SetRule::Type::TorsionBall: {
      if (!(spec == GroupSpec::lattice(1, 1))) throw DomainError("torsion_ball rule needs Z x (Z/2Z)");
      for (std::int64_t k = -(rule.t - 1); k <= rule.t - 1; ++k) {
        if (std::abs(k) > window.bound) continue;
        GroupElement x;
        x.free.push_back(k);
        x.torsion.push_back(1);
        out.push_back(std::move(x));
      }
      break;
    }
    case SetRule::Type::AllNonzero: {
      for (const auto& x : enumerate_window(spec, window)) {
        bool all_nonzero = true;
        for (const auto& v : x.free) {
          if (v == 0) {
            all_nonzero = false;
            break;
          }
        }
        if (all_nonzero) out.push_back(x);
      }
      break;
    }
    case SetRule::Type::ProductPair: {
      const auto ls = evaluate_rule(*rule.left, rule.left_spec, window);
      const auto rs = evaluate_rule(*rule.right, rule.right_spec, window);
      for (const auto& a : ls) {
        for (const auto& b : rs) out.push_back(product_element(rule.left_spec, rule.right_spec, a, b));
      }
      break;
    }
    case SetRule::Type::MaxUnion: {
      const auto ls = evaluate_rule(*rule.left, rule.left_spec, window);
      const auto rs = evaluate_rule(*rule.right, rule.right_spec, window);
      std::set<GroupElement, ElementLess> acc;
      for (const auto& x : enumerate_window(spec, window)) {
        const auto x1 = project_left(rule.left_spec, rule.right_spec, x);
        const auto x2 = project_right(rule.left_spec, rule.right_spec, x);
        const bool in_l = std::binary_search(ls.begin(), ls.end(), x1, ElementLess{});
        const bool in_r = std::binary_search(rs.begin(), rs.end(), x2, ElementLess{});
        if (in_l || in_r) acc.insert(x);
      }
      out.assign(acc.begin(), acc.end());
      break;
    }
    case SetRule::Type::ExplicitSet: {
      for (const auto& x : rule.elements) {
        if (window_contains(spec, window, x)) out.push_back(x);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), ElementLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::ordered_json rule_to_json(const SetRule& rule, const GroupSpec& spec) {
  nlohmann::ordered_json j;
  switch (rule.type) {
    case SetRule::Type::WSymmetric:
      j["type"] = "w_symmetric";
      j["W"] = rule.W;
      break;
    case SetRule::Type::TorsionBall:
      j["type"] = "torsion_ball";
      j["t"] = rule.t;
      break;
    case SetRule::Type::AllNonzero:
      j["type"] = "all_nonzero";
      break;
    case SetRule::Type::ProductPair:
    case SetRule::Type::MaxUnion:
      j["type"] = rule.type == SetRule::Type::ProductPair ? "product_pair" : "max_union";
      j["left_spec"] = spec_to_json(rule.left_spec);
      j["left"] = rule_to_json(*rule.left, rule.left_spec);
      j["right_spec"] = spec_to_json(rule.right_spec);
      j["right"] = rule_to_json(*rule.right, rule.right_spec);
      break;
    case SetRule::Type::ExplicitSet: {
      j["type"] = "explicit";
      auto arr = nlohmann::ordered_json::array();
      for (const auto& x : rule.elements) arr.push_back(element_to_json(spec, x));
      j["elements"] = std::move(arr);
      break;
    }
  }
  return j;
}

SetRule rule_from_json(const nlohmann::json& j, const GroupSpec& spec) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "w_symmetric") {
    std::vector<std::int64_t> W;
    for (const auto& v : j.at("W")) W.push_back(v.get<std::int64_t>());
    return SetRule::w_symmetric(std::move(W));
  }
  if (type == "torsion_ball") return SetRule::torsion_ball(j.at("t").get<std::int64_t>());
  if (type == "all_nonzero") return SetRule::all_nonzero();
  if (type == "product_pair" || type == "max_union") {
    GroupSpec ls = spec_from_json(j.at("left_spec"));
    GroupSpec rs = spec_from_json(j.at("right_spec"));
    SetRule l = rule_from_json(j.at("left"), ls);
    SetRule r = rule_from_json(j.at("right"), rs);
    return type == "product_pair" ? SetRule::product_pair(ls, std::move(l), rs, std::move(r))
                                  : SetRule::max_union(ls, std::move(l), rs, std::move(r));
  }
  if (type == "explicit") {
    std::vector<GroupElement> elements;
    for (const auto& ej : j.at("elements")) elements.push_back(element_from_json(spec, ej));
    return SetRule::explicit_set(std::move(elements));
  }
  throw DomainError("set rule: unknown type '" + type + "'");
}

// ─── Verification ────────────────────────────────────────────────────────

VerificationReport verify_construction(const GeneratorFamily& family, const Expectation& expected,
                                       const std::vector<std::int64_t>& windows, int cap,
                                       const StabilizeOptions& stab) {
  VerificationReport report;
  report.detected = detect_transition(family, windows, cap, stab);
  const auto& det = report.detected;
  if (det.r != expected.r) {
    report.mismatches.push_back("radius: expected " + std::to_string(expected.r) + ", detected " +
                                std::to_string(det.r));
  }
  if (expected.s.has_value()) {
    if (!det.finite) {
      report.mismatches.push_back("sphere count: expected finite " + std::to_string(*expected.s) +
                                  ", detected window-growing");
    } else if (det.s != *expected.s) {
      report.mismatches.push_back("sphere count: expected " + std::to_string(*expected.s) + ", detected " +
                                  std::to_string(det.s));
    }
  } else if (det.finite) {
    report.mismatches.push_back("sphere count: expected window-growing, detected finite " +
                                std::to_string(det.s));
  }
  if (expected.check_set && report.mismatches.empty()) {
    for (const auto& ev : det.evidence) {
      const auto want = evaluate_rule(expected.rule, family.spec, ObservationWindow{ev.window});
      std::vector<GroupElement> got;
      for (const auto& [elem, len] : ev.table.entries) {
        if (len.has_value() && *len == det.r) got.push_back(elem);
      }
      if (want == got) continue;
      auto describe = [&](const GroupElement& x) {
        const auto len = table_lookup(ev.table, x);
        return element_to_text(family.spec, x) + " (length " +
               (len.has_value() ? std::to_string(*len) : std::string("inf-cap")) + ")";
      };
      for (const auto& x : got) {
        if (!std::binary_search(want.begin(), want.end(), x, ElementLess{})) {
          report.mismatches.push_back("window " + std::to_string(ev.window) + ": unexpected transition element " +
                                      describe(x));
        }
      }
      for (const auto& x : want) {
        if (!std::binary_search(got.begin(), got.end(), x, ElementLess{})) {
          report.mismatches.push_back("window " + std::to_string(ev.window) + ": missing transition element " +
                                      describe(x));
        }
      }
    }
  }
  report.pass = report.mismatches.empty();
  return report;
}

nlohmann::ordered_json verification_report_to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["pass"] = report.pass;
  j["mismatches"] = report.mismatches;
  j["detected"] = transition_report_to_json(report.detected);
  return j;
}

std::string verification_report_to_text(const VerificationReport& report) {
  std::string out = report.pass ? "PASS\n" : "FAIL\n";
  for (const auto& m : report.mismatches) out += "  " + m + "\n";
  out += transition_report_to_text(report.detected);
  return out;
}

// ─── Counting / profiles ─────────────────────────────────────────────────

std::int64_t counting_function(const GeneratorFamily& family, std::int64_t t) {
  if (!(family.spec == GroupSpec::lattice(1, 0))) {
    throw DomainError("counting_function requires a family over Z");
  }
  if (t < 1) throw DomainError("counting_function: t must be positive");
  if (family.kind == FamilyKind::ExplicitFinite) {
    std::int64_t count = 0;
    for (const auto& x : family.members) {
      if (x.free[0] > 0 && x.free[0] <= t) ++count;
    }
    return count;
  }
  if (has_increasing_positive_enumeration(family)) {
    std::int64_t count = 0;
    std::size_t k = 64;
    while (true) {
      const auto members = first_members(family, k);
      count = 0;
      for (const auto& x : members) {
        if (x.free[0] > t) return count;
        if (x.free[0] > 0) ++count;
      }
      if (members.size() < k) return count;  // finite enumeration exhausted
      k *= 2;
    }
  }
  // Fallback: membership scan (CoordinateAxes(1) lands here).
  if (t > 1'000'000) throw DomainError("counting_function: t too large for a membership scan");
  std::int64_t count = 0;
  GroupElement x;
  x.free.push_back(0);
  for (std::int64_t v = 1; v <= t; ++v) {
    x.free[0] = v;
    if (is_member(family, x)) ++count;
  }
  return count;
}

std::vector<ProfileRow> growth_profile(const GeneratorFamily& family,
                                       const std::vector<std::int64_t>& windows, int cap,
                                       const StabilizeOptions& stab) {
  auto classified = classify_family(family, windows, cap, stab);
  std::vector<ProfileRow> rows;
  for (int q = 0; q <= cap; ++q) {
    for (const auto& ev : classified.evidence) {
      rows.push_back(ProfileRow{q, ev.window, ev.counts[static_cast<std::size_t>(q)],
                                classified.classes[static_cast<std::size_t>(q)]});
    }
  }
  return rows;
}

std::string profile_to_csv(const std::vector<ProfileRow>& rows) {
  std::string out = "radius,window,count,class\n";
  for (const auto& row : rows) {
    out += std::to_string(row.radius) + "," + std::to_string(row.window) + "," + std::to_string(row.count) +
           "," + radius_class_name(row.cls) + "\n";
  }
  return out;
}

bool transition_set_has_involution(const GroupSpec& spec, const std::vector<GroupElement>& set) {
  const auto e = identity_element(spec);
  for (const auto& x : set) {
    if (!(x == e) && add(spec, x, x) == e) return true;
  }
  return false;
}

}  // namespace phaseforge
