#pragma once

// Run configuration: a sectioned `key = value` text format mapping 1:1 onto RunConfig.
//
//   [section]
//   key = value        ; or # starts a comment line
//
// Unknown sections or keys, duplicates and malformed values are hard errors carrying the line number.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipip/core.hpp"
#include "ipip/discretize.hpp"
#include "ipip/io.hpp"

namespace ipip::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ModelKind { gaussian, parabolic, step, file };
enum class TiltRule { contained, centered, fixed };
enum class GaussianImage { analytic, propagated };
enum class ExperimentKind { reconstruct, sweep_tau, sweep_delta, sweep_xmax, forward_only, special_real, special_imag };
enum class Spacing { log, linear };

inline const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::gaussian: return "gaussian";
    case ModelKind::parabolic: return "parabolic";
    case ModelKind::step: return "step";
    case ModelKind::file: return "file";
  }
  return "?";
}
inline const char* to_string(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::reconstruct: return "reconstruct";
    case ExperimentKind::sweep_tau: return "sweep_tau";
    case ExperimentKind::sweep_delta: return "sweep_delta";
    case ExperimentKind::sweep_xmax: return "sweep_xmax";
    case ExperimentKind::forward_only: return "forward_only";
    case ExperimentKind::special_real: return "special_real";
    case ExperimentKind::special_imag: return "special_imag";
  }
  return "?";
}
inline const char* to_string(RegularizationMode m) {
  switch (m) {
    case RegularizationMode::unit: return "unit";
    case RegularizationMode::phase: return "phase";
    case RegularizationMode::shift: return "shift";
  }
  return "?";
}
inline const char* to_string(TiltRule t) {
  return t == TiltRule::contained ? "auto" : t == TiltRule::centered ? "centered" : "fixed";
}
inline const char* to_string(GaussianImage g) { return g == GaussianImage::analytic ? "analytic" : "propagated"; }
inline const char* to_string(Spacing s) { return s == Spacing::log ? "log" : "linear"; }

struct SweepRange {
  double from = 0.0;
  double to = 0.0;
  std::size_t count = 0;
  Spacing spacing = Spacing::log;
  friend bool operator==(const SweepRange&, const SweepRange&) = default;
};

struct RunConfig {
  // [physical]
  double wavelength = 0.01;
  double theta = 0.0;
  // [boundary]
  double z_min = 90.0;
  double z_max = 100.0;
  std::size_t intervals = 2514;
  // [image]
  double x_min = 2.8284;
  double x_max = 28.284;
  std::size_t x_intervals = 2828;
  std::string image_file;
  // [model]
  std::vector<ModelKind> models{ModelKind::gaussian, ModelKind::parabolic, ModelKind::step};
  double rayleigh_length = 20.0;
  TiltRule tilt = TiltRule::contained;
  double tilt_value = 0.0;
  std::optional<double> center;  ///< defaults to the midpoint of the boundary interval
  double semi_length = 4.8;
  double period = 1.0;
  std::size_t forward_intervals = 2514;
  GaussianImage gaussian_image = GaussianImage::analytic;
  // [regularization]
  RegularizationMode reg_mode = RegularizationMode::unit;
  double delta = 0.0;
  // [discretization]
  CornerMode corner_mode = CornerMode::clamp;
  double clamp_value = 1e8;
  double mask = 1e-3;
  // [experiment]
  ExperimentKind experiment = ExperimentKind::reconstruct;
  std::vector<double> values;
  std::optional<SweepRange> range;
  RegularizationMode sweep_mode = RegularizationMode::shift;
  // [output]
  std::string output_dir = "out";
  bool dump_matrix = false;

  double z_center() const { return center.value_or(0.5 * (z_min + z_max)); }
  bool has_model(ModelKind m) const { return std::find(models.begin(), models.end(), m) != models.end(); }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) out.push_back(trim(t));
  return out;
}

inline double to_double(const std::string& v, std::size_t line, const std::string& key) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'", line);
  }
  if (used != v.size()) throw ConfigError(key + ": not a number: '" + v + "'", line);
  if (std::isnan(d)) throw ConfigError(key + ": NaN is not allowed", line);
  return d;
}

inline std::size_t to_count(const std::string& v, std::size_t line, const std::string& key) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'", line);
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range", line);
  }
}

template <class E>
E to_enum(const std::string& v, std::initializer_list<std::pair<const char*, E>> table, std::size_t line,
          const std::string& key) {
  std::string allowed;
  for (const auto& [name, e] : table) {
    if (v == name) return e;
    allowed += (allowed.empty() ? "" : "|") + std::string(name);
  }
  throw ConfigError(key + ": expected one of " + allowed + ", got '" + v + "'", line);
}

inline bool to_bool(const std::string& v, std::size_t line, const std::string& key) {
  return to_enum<bool>(v, {{"true", true}, {"false", false}, {"1", true}, {"0", false}}, line, key);
}

inline const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"physical", {"wavelength", "theta"}},
      {"boundary", {"z_min", "z_max", "intervals"}},
      {"image", {"x_min", "x_max", "intervals", "file"}},
      {"model",
       {"kind", "rayleigh_length", "tilt", "center", "semi_length", "period", "forward_intervals", "gaussian_image"}},
      {"regularization", {"mode", "delta"}},
      {"discretization", {"corner_mode", "clamp_value", "mask"}},
      {"experiment", {"kind", "values", "from", "to", "count", "spacing", "sweep_mode"}},
      {"output", {"dir", "dump_matrix"}},
  };
  return s;
}

}  // namespace detail

inline std::vector<double> spaced(double from, double to, std::size_t count, Spacing s) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    v[i] = s == Spacing::log ? std::exp(std::log(from) + t * (std::log(to) - std::log(from))) : from + t * (to - from);
  }
  return v;
}

/// Sweep abscissae: explicit values, a range, or the experiment's default.
inline std::vector<double> sweep_values(const RunConfig& c) {
  if (!c.values.empty()) return c.values;
  if (c.range) return spaced(c.range->from, c.range->to, c.range->count, c.range->spacing);
  const double span = c.z_max - c.z_min;
  switch (c.experiment) {
    case ExperimentKind::sweep_tau:
      return spaced(span / 4000.0, span / 50.0, 12, Spacing::log);
    case ExperimentKind::sweep_delta: {
      auto v = spaced(1e-4, 0.5, 12, Spacing::log);
      v.insert(v.begin(), 0.0);
      return v;
    }
    case ExperimentKind::sweep_xmax:
      return spaced(c.x_min + 0.1 * (c.x_max - c.x_min), c.x_max, 12, Spacing::linear);
    default:
      return {};
  }
}

/// Line of each `section.key` seen while parsing; used to point validation errors at the source.
using KeyLines = std::map<std::string, std::size_t>;

/// Precondition checks shared by every experiment; run before any computation.
inline void validate(const RunConfig& c, const KeyLines& lines = {}) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    const auto it = lines.find(key);
    throw ConfigError(key + ": " + msg, it == lines.end() ? 0 : it->second);
  };
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_pos(c.wavelength)) fail("physical.wavelength", "must be positive and finite");
  if (!(std::abs(c.theta) < pi / 2)) fail("physical.theta", "must satisfy |theta| < pi/2");
  if (!finite_pos(c.z_min)) fail("boundary.z_min", "must be positive");
  if (!(c.z_max > c.z_min) || !std::isfinite(c.z_max)) fail("boundary.z_max", "must exceed z_min");
  if (c.intervals < 4) fail("boundary.intervals", "at least 4 intervals required");
  const bool from_file = c.has_model(ModelKind::file);
  if (!from_file) {
    if (!finite_pos(c.x_min)) fail("image.x_min", "must be positive (the propagation kernel is singular at x = 0)");
    if (!(c.x_max > c.x_min) || !std::isfinite(c.x_max)) fail("image.x_max", "must exceed x_min");
    if (c.x_intervals < 2) fail("image.intervals", "at least 2 intervals required");
    if (!c.image_file.empty()) fail("image.file", "requires kind = file in [model]");
  } else if (c.image_file.empty()) {
    fail("image.file", "model kind 'file' needs an image data file");
  }
  if (c.models.empty()) fail("model.kind", "at least one model required");
  for (std::size_t i = 0; i < c.models.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (c.models[i] == c.models[j]) fail("model.kind", std::string("duplicate model ") + to_string(c.models[i]));
  if (!finite_pos(c.rayleigh_length)) fail("model.rayleigh_length", "must be positive");
  if (c.tilt == TiltRule::fixed && !std::isfinite(c.tilt_value)) fail("model.tilt", "must be finite");
  const double zc = c.z_center();
  if (!(zc > c.z_min && zc < c.z_max)) fail("model.center", "must lie strictly inside (z_min, z_max)");
  if (c.has_model(ModelKind::parabolic) || c.has_model(ModelKind::step)) {
    if (!finite_pos(c.semi_length)) fail("model.semi_length", "must be positive");
    if (!(zc - c.semi_length >= c.z_min && zc + c.semi_length <= c.z_max))
      fail("model.semi_length", "support [center - a, center + a] must fit inside [z_min, z_max]");
  }
  if (!(c.period > 0.0)) fail("model.period", "must be positive or inf");
  if (c.forward_intervals < 4) fail("model.forward_intervals", "at least 4 intervals required");
  if (!(c.delta >= 0.0) || !std::isfinite(c.delta)) fail("regularization.delta", "must be non-negative");
  if (c.reg_mode == RegularizationMode::unit && c.delta != 0.0)
    fail("regularization.delta", "mode 'unit' takes no delta");
  if (!finite_pos(c.clamp_value)) fail("discretization.clamp_value", "must be positive");
  if (!(c.mask > 0.0 && c.mask < 1.0)) fail("discretization.mask", "must lie in (0, 1)");

  const bool sweep = c.experiment == ExperimentKind::sweep_tau || c.experiment == ExperimentKind::sweep_delta ||
                     c.experiment == ExperimentKind::sweep_xmax;
  if (!sweep && (!c.values.empty() || c.range)) fail("experiment.values", "only sweeps take values");
  if (!c.values.empty() && c.range) fail("experiment.values", "give either values or from/to/count, not both");
  if (c.range) {
    const auto& r = *c.range;
    if (r.count < 1) fail("experiment.count", "must be at least 1");
    if (!std::isfinite(r.from) || !std::isfinite(r.to)) fail("experiment.from", "must be finite");
    if (r.spacing == Spacing::log && !(r.from > 0.0 && r.to > 0.0))
      fail("experiment.from", "log spacing needs positive from and to");
  }
  if (c.experiment == ExperimentKind::sweep_delta && c.sweep_mode == RegularizationMode::unit)
    fail("experiment.sweep_mode", "must be phase or shift");
  const std::string vkey = c.range ? "experiment.from" : "experiment.values";
  for (double v : sweep_values(c)) {
    if (c.experiment == ExperimentKind::sweep_tau && !(v > 0.0 && v <= (c.z_max - c.z_min) / 4))
      fail(vkey, "boundary step " + fmt(v) + " outside (0, (z_max - z_min) / 4]");
    if (c.experiment == ExperimentKind::sweep_delta && !(v >= 0.0 && std::isfinite(v)))
      fail(vkey, "delta " + fmt(v) + " must be non-negative");
    if (c.experiment == ExperimentKind::sweep_xmax && !from_file && !(v > c.x_min && v <= c.x_max))
      fail(vkey, "window limit " + fmt(v) + " outside (x_min, x_max]");
  }
}

/// Parses and validates configuration text.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  KeyLines lines;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t ln = 0;
  std::optional<double> from, to;
  std::optional<std::size_t> count;
  std::optional<Spacing> spacing;
  std::size_t range_line = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", ln);
      section = detail::trim(s.substr(1, s.size() - 2));
      if (!detail::schema().count(section)) throw ConfigError("unknown section [" + section + "]", ln);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", ln);
    if (section.empty()) throw ConfigError("key outside of any section", ln);
    const std::string key = detail::trim(s.substr(0, eq)), v = detail::trim(s.substr(eq + 1));
    const auto& allowed = detail::schema().at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", ln);
    const std::string full = section + "." + key;
    if (!lines.emplace(full, ln).second)
      throw ConfigError("duplicate key '" + full + "' (first set on line " + std::to_string(lines[full]) + ")", ln);
    auto num = [&] { return detail::to_double(v, ln, full); };
    auto cnt = [&] { return detail::to_count(v, ln, full); };

    if (full == "physical.wavelength") c.wavelength = num();
    else if (full == "physical.theta") c.theta = num();
    else if (full == "boundary.z_min") c.z_min = num();
    else if (full == "boundary.z_max") c.z_max = num();
    else if (full == "boundary.intervals") c.intervals = cnt();
    else if (full == "image.x_min") c.x_min = num();
    else if (full == "image.x_max") c.x_max = num();
    else if (full == "image.intervals") c.x_intervals = cnt();
    else if (full == "image.file") c.image_file = v;
    else if (full == "model.kind") {
      c.models.clear();
      for (const auto& t : detail::split_list(v))
        c.models.push_back(detail::to_enum<ModelKind>(
            t, {{"gaussian", ModelKind::gaussian}, {"parabolic", ModelKind::parabolic}, {"step", ModelKind::step},
                {"file", ModelKind::file}},
            ln, full));
    } else if (full == "model.rayleigh_length") c.rayleigh_length = num();
    else if (full == "model.tilt") {
      if (v == "auto") c.tilt = TiltRule::contained;
      else if (v == "centered") c.tilt = TiltRule::centered;
      else {
        c.tilt = TiltRule::fixed;
        c.tilt_value = num();
      }
    } else if (full == "model.center") {
      if (v != "auto") c.center = num();
    } else if (full == "model.semi_length") c.semi_length = num();
    else if (full == "model.period") c.period = num();
    else if (full == "model.forward_intervals") c.forward_intervals = cnt();
    else if (full == "model.gaussian_image")
      c.gaussian_image = detail::to_enum<GaussianImage>(
          v, {{"analytic", GaussianImage::analytic}, {"propagated", GaussianImage::propagated}}, ln, full);
    else if (full == "regularization.mode")
      c.reg_mode = detail::to_enum<RegularizationMode>(
          v, {{"unit", RegularizationMode::unit}, {"phase", RegularizationMode::phase}, {"shift", RegularizationMode::shift}},
          ln, full);
    else if (full == "regularization.delta") c.delta = num();
    else if (full == "discretization.corner_mode")
      c.corner_mode = detail::to_enum<CornerMode>(
          v, {{"clamp", CornerMode::clamp}, {"explicit_unit", CornerMode::explicit_unit}}, ln, full);
    else if (full == "discretization.clamp_value") c.clamp_value = num();
    else if (full == "discretization.mask") c.mask = num();
    else if (full == "experiment.kind")
      c.experiment = detail::to_enum<ExperimentKind>(
          v,
          {{"reconstruct", ExperimentKind::reconstruct}, {"sweep_tau", ExperimentKind::sweep_tau},
           {"sweep_delta", ExperimentKind::sweep_delta}, {"sweep_xmax", ExperimentKind::sweep_xmax},
           {"forward_only", ExperimentKind::forward_only}, {"special_real", ExperimentKind::special_real},
           {"special_imag", ExperimentKind::special_imag}},
          ln, full);
    else if (full == "experiment.values") {
      for (const auto& t : detail::split_list(v)) c.values.push_back(detail::to_double(t, ln, full));
      if (c.values.empty()) throw ConfigError(full + ": empty list", ln);
    } else if (full == "experiment.from") from = num(), range_line = ln;
    else if (full == "experiment.to") to = num(), range_line = ln;
    else if (full == "experiment.count") count = cnt(), range_line = ln;
    else if (full == "experiment.spacing")
      spacing = detail::to_enum<Spacing>(v, {{"log", Spacing::log}, {"linear", Spacing::linear}}, ln, full);
    else if (full == "experiment.sweep_mode")
      c.sweep_mode = detail::to_enum<RegularizationMode>(
          v, {{"phase", RegularizationMode::phase}, {"shift", RegularizationMode::shift}}, ln, full);
    else if (full == "output.dir") c.output_dir = v;
    else if (full == "output.dump_matrix") c.dump_matrix = detail::to_bool(v, ln, full);
  }
  if (c.has_model(ModelKind::file))
    for (const char* k : {"image.x_min", "image.x_max", "image.intervals"})
      if (lines.count(k)) throw ConfigError(std::string(k) + ": the image grid is read from the data file", lines[k]);
  if (from || to || count || spacing) {
    if (!from || !to || !count) throw ConfigError("experiment: from, to and count must be given together", range_line);
    c.range = SweepRange{*from, *to, *count, spacing.value_or(Spacing::log)};
  }
  validate(c, lines);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

/// Canonical text form; parse_config(to_text(c)) == c.
inline std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "[physical]\nwavelength = " << fmt(c.wavelength) << "\ntheta = " << fmt(c.theta) << "\n\n";
  o << "[boundary]\nz_min = " << fmt(c.z_min) << "\nz_max = " << fmt(c.z_max) << "\nintervals = " << c.intervals
    << "\n\n";
  o << "[image]\n";
  if (c.image_file.empty())
    o << "x_min = " << fmt(c.x_min) << "\nx_max = " << fmt(c.x_max) << "\nintervals = " << c.x_intervals << "\n\n";
  else
    o << "file = " << c.image_file << "\n\n";
  o << "[model]\nkind = ";
  for (std::size_t i = 0; i < c.models.size(); ++i) o << (i ? ", " : "") << to_string(c.models[i]);
  o << "\nrayleigh_length = " << fmt(c.rayleigh_length) << "\ntilt = ";
  if (c.tilt == TiltRule::fixed) o << fmt(c.tilt_value);
  else o << to_string(c.tilt);
  o << "\ncenter = " << (c.center ? fmt(*c.center) : std::string("auto")) << "\nsemi_length = " << fmt(c.semi_length)
    << "\nperiod = " << (std::isinf(c.period) ? std::string("inf") : fmt(c.period))
    << "\nforward_intervals = " << c.forward_intervals << "\ngaussian_image = " << to_string(c.gaussian_image)
    << "\n\n";
  o << "[regularization]\nmode = " << to_string(c.reg_mode) << "\ndelta = " << fmt(c.delta) << "\n\n";
  o << "[discretization]\ncorner_mode = " << to_string(c.corner_mode) << "\nclamp_value = " << fmt(c.clamp_value)
    << "\nmask = " << fmt(c.mask) << "\n\n";
  o << "[experiment]\nkind = " << to_string(c.experiment) << "\n";
  if (!c.values.empty()) {
    o << "values = ";
    for (std::size_t i = 0; i < c.values.size(); ++i) o << (i ? ", " : "") << fmt(c.values[i]);
    o << "\n";
  }
  if (c.range)
    o << "from = " << fmt(c.range->from) << "\nto = " << fmt(c.range->to) << "\ncount = " << c.range->count
      << "\nspacing = " << to_string(c.range->spacing) << "\n";
  o << "sweep_mode = " << to_string(c.sweep_mode) << "\n";
  o << "\n[output]\ndir = " << c.output_dir << "\ndump_matrix = " << (c.dump_matrix ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace ipip::cli
