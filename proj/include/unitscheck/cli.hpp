#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unitscheck/report.hpp"

namespace unitscheck {

struct CliConfig {
  enum class Mode { Suggest, Infer, Check, Synth };
  Mode mode = Mode::Check;
  std::vector<std::string> files;
  bool json = false;
  bool in_place = false;          // Synth only
  bool show_burden = false;       // Suggest only
  std::optional<std::string> output_path;  // Synth only
};

namespace detail {

inline nlohmann::ordered_json span_json(const Span& s) {
  return nlohmann::ordered_json{{"line", s.line}, {"column", s.column}};
}

inline nlohmann::ordered_json suggest_json(const SuggestReport& r,
                                           const std::optional<Burden>& burden) {
  nlohmann::ordered_json doc;
  doc["file"] = r.file;
  doc["mode"] = "suggest";
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& [name, span] : r.entries) {
    nlohmann::ordered_json e = {{"name", name}};
    e.update(span_json(span));
    doc["entries"].push_back(std::move(e));
  }
  if (burden) {
    doc["burden"] = {{"total", burden->total},
                     {"critical", burden->critical},
                     {"reduction", burden->reduction ? nlohmann::ordered_json(*burden->reduction)
                                                     : nlohmann::ordered_json(nullptr)}};
  }
  return doc;
}

inline nlohmann::ordered_json infer_json(const InferReport& r) {
  nlohmann::ordered_json doc;
  doc["file"] = r.file;
  doc["mode"] = "infer";
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) {
    nlohmann::ordered_json j = {{"name", e.name}};
    j.update(span_json(e.span));
    j["unit"] = e.unit_text;
    j["polymorphic"] = e.polymorphic;
    doc["entries"].push_back(std::move(j));
  }
  doc["underdetermined"] = nlohmann::ordered_json::array();
  for (const auto& [name, span] : r.unresolved) {
    nlohmann::ordered_json j = {{"name", name}};
    j.update(span_json(span));
    doc["underdetermined"].push_back(std::move(j));
  }
  return doc;
}

inline nlohmann::ordered_json check_json(const CheckReport& r, const std::string& mode) {
  nlohmann::ordered_json doc;
  doc["file"] = r.file;
  doc["mode"] = mode;
  doc["verdict"] = r.consistent ? "consistent" : "inconsistent";
  doc["conflicts"] = nlohmann::ordered_json::array();
  for (const auto& c : r.conflicts) {
    nlohmann::ordered_json jc;
    jc["message"] = c.message;
    jc["spans"] = nlohmann::ordered_json::array();
    for (const auto& tag : c.spans) {
      nlohmann::ordered_json js = {{"file", tag.span.file}};
      js.update(span_json(tag.span));
      js["reason"] = reason_text(tag.reason);
      jc["spans"].push_back(std::move(js));
    }
    doc["conflicts"].push_back(std::move(jc));
  }
  return doc;
}

inline const char* mode_name(CliConfig::Mode m) {
  switch (m) {
    case CliConfig::Mode::Suggest: return "suggest";
    case CliConfig::Mode::Infer: return "infer";
    case CliConfig::Mode::Check: return "check";
    case CliConfig::Mode::Synth: return "synth";
  }
  return "";
}

inline bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return in.good() || in.eof();
}

inline bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace detail

/// Machine-readable encoding of one report, one JSON document per file.
inline std::string emit_json(const SuggestReport& r,
                             const std::optional<Burden>& burden = std::nullopt) {
  return detail::suggest_json(r, burden).dump() + "\n";
}
inline std::string emit_json(const InferReport& r) { return detail::infer_json(r).dump() + "\n"; }
inline std::string emit_json(const CheckReport& r) {
  return detail::check_json(r, "check").dump() + "\n";
}

/// Analyze every file independently and emit reports in argument order.
/// Exit code 0: success / consistent; 1: an inconsistency was found or
/// suggest produced entries; 2: usage, I/O, or parse errors.
inline int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.files.empty()) {
    err << "unitscheck: no input files\n";
    return 2;
  }
  if (config.output_path && config.files.size() > 1) {
    err << "unitscheck: --output requires exactly one input file\n";
    return 2;
  }
  if (config.output_path && config.in_place) {
    err << "unitscheck: --output and --in-place are mutually exclusive\n";
    return 2;
  }

  int exit_code = 0;
  auto bump = [&](int code) { exit_code = std::max(exit_code, code); };

  for (const auto& path : config.files) {
    std::string text;
    if (!detail::read_file(path, text)) {
      err << "unitscheck: cannot read '" << path << "'\n";
      bump(2);
      continue;
    }

    Analysis analysis;
    try {
      analysis = analyze_source(text, path);
    } catch (const SourceError& e) {
      err << e.what() << "\n";
      bump(2);
      continue;
    }

    if (!analysis.consistent()) {
      CheckReport report = make_check(analysis);
      if (config.json) {
        out << detail::check_json(report, detail::mode_name(config.mode)).dump() << "\n";
      } else {
        out << render_check(report);
      }
      bump(1);
      continue;
    }

    switch (config.mode) {
      case CliConfig::Mode::Suggest: {
        SuggestReport report = make_suggest(analysis);
        std::optional<Burden> burden;
        if (config.show_burden) burden = annotation_burden(analysis.program, report);
        if (config.json) {
          out << emit_json(report, burden);
        } else {
          out << render_suggest(report);
          if (burden) out << render_burden(*burden);
        }
        if (report.count > 0) bump(1);
        break;
      }
      case CliConfig::Mode::Infer: {
        InferReport report = make_infer(analysis);
        out << (config.json ? emit_json(report) : render_infer(report));
        break;
      }
      case CliConfig::Mode::Check: {
        CheckReport report = make_check(analysis);
        out << (config.json ? emit_json(report) : render_check(report));
        break;
      }
      case CliConfig::Mode::Synth: {
        auto [plan, rewritten] = synthesize(analysis);
        if (config.in_place) {
          if (!detail::write_file(path, rewritten)) {
            err << "unitscheck: cannot write '" << path << "'\n";
            bump(2);
          }
        } else if (config.output_path) {
          if (!detail::write_file(*config.output_path, rewritten)) {
            err << "unitscheck: cannot write '" << *config.output_path << "'\n";
            bump(2);
          }
        } else {
          out << rewritten;
        }
        break;
      }
    }
  }
  return exit_code;
}

}  // namespace unitscheck
