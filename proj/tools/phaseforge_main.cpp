#include "phaseforge/analyzer.hpp"
#include "phaseforge/cache.hpp"
#include "phaseforge/engine.hpp"
#include "phaseforge/errors.hpp"
#include "phaseforge/family.hpp"
#include "phaseforge/suites.hpp"
#include "phaseforge/window.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

using namespace phaseforge;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitComputation = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw DomainError("cannot write file '" + out_path + "'");
  out << content;
  if (!content.empty() && content.back() != '\n') out << "\n";
}

// Families are accepted as file paths or inline JSON strings. Family files
// may wrap the descriptor together with a member preview.
GeneratorFamily load_family(const std::string& arg) {
  std::string text = arg;
  if (text.empty()) throw DomainError("family argument is empty");
  if (text.front() != '{') text = read_file(arg);
  const auto j = nlohmann::json::parse(text);
  if (j.is_object() && j.contains("family")) return family_from_json(j.at("family"));
  return family_from_json(j);
}

std::string family_file_text(const GeneratorFamily& family) {
  nlohmann::ordered_json j;
  j["format"] = "phaseforge-family/1";
  j["family"] = family_to_json(family);
  auto preview = nlohmann::ordered_json::array();
  for (const auto& member : first_members(family, 8)) {
    preview.push_back(element_to_text(family.spec, member));
  }
  j["preview"] = std::move(preview);
  return j.dump();
}

std::vector<std::int64_t> parse_windows(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoll(item));
  }
  if (out.empty()) throw DomainError("--windows must list at least one bound");
  return out;
}

int run_table(const std::string& family_arg, std::int64_t window_bound, int cap,
              std::size_t k_override, const std::string& format, const std::string& out_path,
              bool no_cache) {
  const auto family = load_family(family_arg);
  const ObservationWindow window{window_bound};
  LengthTable table;
  if (k_override > 0) {
    table = build_length_table(family, window, cap, k_override);  // stamped uncertified
  } else {
    ResultCache cache = ResultCache::from_env();
    const std::string key = "table\n" + canonical_family_json(family) +
                            "\nwindow=" + std::to_string(window_bound) + "\ncap=" + std::to_string(cap);
    std::optional<std::string> payload = no_cache ? std::nullopt : cache.lookup(key);
    if (payload.has_value()) {
      table = table_from_json(family.spec, nlohmann::json::parse(*payload));
    } else {
      table = stabilize_table(family, window, cap).table;
      if (!no_cache) cache.store(key, table_to_json(family.spec, table).dump());
    }
  }
  if (format == "json") {
    write_output(out_path, table_to_json(family.spec, table).dump());
  } else if (format == "csv") {
    write_output(out_path, table_to_csv(family.spec, table));
  } else {
    std::string text = (table.certified ? std::string("certified") : std::string("uncertified")) +
                       " table, window " + std::to_string(table.window_bound) + ", cap " +
                       std::to_string(table.cap) + ", K " + std::to_string(table.truncation) + "\n";
    for (const auto& [elem, len] : table.entries) {
      text += "  " + element_to_text(family.spec, elem) + " -> " +
              (len.has_value() ? std::to_string(*len) : std::string("inf-cap")) + "\n";
    }
    write_output(out_path, text);
  }
  return kExitOk;
}

int run_verify_expectation(const std::string& family_arg, const std::string& expect_path,
                           const std::string& windows_text, int cap, const std::string& format,
                           const std::string& out_path) {
  const auto family = load_family(family_arg);
  const auto ej = nlohmann::json::parse(read_file(expect_path));
  Expectation expect;
  expect.r = ej.at("r").get<int>();
  if (ej.at("s").is_number_integer()) {
    expect.s = ej.at("s").get<std::int64_t>();
  } else if (ej.at("s").get<std::string>() == "window-growing") {
    expect.s = std::nullopt;
  } else {
    throw DomainError("expectation: \"s\" must be an integer or \"window-growing\"");
  }
  if (ej.contains("set")) {
    expect.rule = rule_from_json(ej.at("set"), family.spec);
  } else {
    expect.check_set = false;
  }
  const auto report = verify_construction(family, expect, parse_windows(windows_text), cap);
  write_output(out_path, format == "json" ? verification_report_to_json(report).dump()
                                          : verification_report_to_text(report));
  return report.pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseforge: exact word lengths, spheres, and growth tables for infinite generating sets"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::string family_arg, out_path, format = "json", windows_text, expect_path, suite_name;
  std::int64_t window_bound = 0, t_value = 0;
  int cap = 0;
  std::size_t k_override = 0;
  bool no_cache = false;

  auto add_format = [&format](CLI::App* cmd, bool with_csv) {
    auto* opt = cmd->add_option("--format", format, "output format");
    if (with_csv) {
      opt->check(CLI::IsMember({"json", "csv", "text"}));
    } else {
      opt->check(CLI::IsMember({"json", "text"}));
    }
  };

  {
    auto* cmd = app.add_subcommand("build", "validate a family descriptor and write a canonical family file");
    cmd->add_option("descriptor", family_arg, "descriptor JSON (file or inline)")->required();
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->callback([&] {
      action = [&]() {
        write_output(out_path, family_file_text(load_family(family_arg)));
        return kExitOk;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("table", "certified length table over an observation window");
    cmd->add_option("family", family_arg, "family file or inline JSON")->required();
    cmd->add_option("--window", window_bound, "window bound N")->required();
    cmd->add_option("--cap", cap, "length cap")->required();
    cmd->add_option("--K", k_override, "force an uncertified truncation level")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-cache", no_cache, "bypass the result cache");
    cmd->add_option("--out", out_path, "output path (default stdout)");
    add_format(cmd, true);
    cmd->callback([&] {
      action = [&]() {
        return run_table(family_arg, window_bound, cap, k_override, format, out_path, no_cache);
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("transition", "detect the phase transition across growing windows");
    cmd->add_option("family", family_arg, "family file or inline JSON")->required();
    cmd->add_option("--windows", windows_text, "comma-separated increasing bounds (at least 3)")->required();
    cmd->add_option("--cap", cap, "length cap")->required();
    cmd->add_option("--out", out_path, "output path (default stdout)");
    add_format(cmd, false);
    cmd->callback([&] {
      action = [&]() {
        const auto family = load_family(family_arg);
        const auto report = detect_transition(family, parse_windows(windows_text), cap);
        write_output(out_path, format == "json" ? transition_report_to_json(report).dump()
                                                : transition_report_to_text(report));
        return kExitOk;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("verify", "run a named suite, or verify a family against an expectation file");
    cmd->add_option("suite", suite_name, "suite name (zphases, lemma2s, lemma3s, oddphase, products, examples)");
    cmd->add_option("--family", family_arg, "family file or inline JSON");
    cmd->add_option("--expect", expect_path, "expectation JSON file");
    cmd->add_option("--windows", windows_text, "comma-separated increasing bounds");
    cmd->add_option("--cap", cap, "length cap");
    cmd->add_option("--out", out_path, "output path (default stdout)");
    add_format(cmd, false);
    cmd->callback([&, cmd] {
      const bool format_given = cmd->count("--format") > 0;
      action = [&, format_given]() {
        // suite runs read best as text unless JSON was asked for
        const std::string fmt = format_given ? format : "text";
        if (!suite_name.empty()) {
          const auto report = run_suite(suite_name);
          write_output(out_path, fmt == "json" ? report.to_json_string() : report.to_text());
          return report.passed() ? kExitOk : kExitVerifyFail;
        }
        if (family_arg.empty() || expect_path.empty() || windows_text.empty() || cap == 0) {
          throw DomainError("verify needs a suite name, or --family --expect --windows --cap");
        }
        return run_verify_expectation(family_arg, expect_path, windows_text, cap, fmt, out_path);
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("profile", "growth profile CSV across radii and windows");
    cmd->add_option("family", family_arg, "family file or inline JSON")->required();
    cmd->add_option("--windows", windows_text, "comma-separated increasing bounds (at least 3)")->required();
    cmd->add_option("--cap", cap, "length cap")->required();
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->callback([&] {
      action = [&]() {
        const auto family = load_family(family_arg);
        write_output(out_path, profile_to_csv(growth_profile(family, parse_windows(windows_text), cap)));
        return kExitOk;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("counting", "counting function A(t) for families over Z");
    cmd->add_option("family", family_arg, "family file or inline JSON")->required();
    cmd->add_option("--t", t_value, "upper bound t")->required();
    cmd->add_option("--out", out_path, "output path (default stdout)");
    add_format(cmd, false);
    cmd->callback([&] {
      action = [&]() {
        const auto family = load_family(family_arg);
        const auto count = counting_function(family, t_value);
        if (format == "json") {
          nlohmann::ordered_json j;
          j["t"] = t_value;
          j["count"] = count;
          write_output(out_path, j.dump());
        } else {
          write_output(out_path, std::to_string(count));
        }
        return kExitOk;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const StabilizationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& entry : e.divergent) {
      std::cerr << "  divergent: " << entry.element << " " << entry.length_before << " (K=" << entry.k_before
                << ") -> " << entry.length_after << " (K=" << entry.k_after << ")\n";
    }
    return kExitComputation;
  } catch (const ConsistencyViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
