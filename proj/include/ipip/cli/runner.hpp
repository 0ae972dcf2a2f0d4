#pragma once

// Experiment runner: builds the model fields, executes one experiment and writes CSV tables,
// gnuplot scripts and a JSON manifest with checksums of every artifact.

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ipip/analysis.hpp"
#include "ipip/cli/config.hpp"
#include "ipip/discretize.hpp"
#include "ipip/forward.hpp"
#include "ipip/io.hpp"
#include "ipip/models.hpp"
#include "ipip/solver.hpp"
#include "json.hpp"

namespace ipip::cli {

using json = nlohmann::ordered_json;

/// Numerical failure that still yields a manifest (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PreparedModel {
  std::string name;
  std::function<cplx(double)> truth;  ///< amplitude at distance s along the boundary line; empty if unknown
  ImageLine image;                    ///< physical image-line data
};

struct RunOutcome {
  int exit_code = 0;
  json manifest;
};

namespace detail {

/// Writes artifacts into the output directory and records their checksums.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    record(name);
  }

  void record(const std::string& name) {
    const auto path = dir_ / name;
    list_.push_back({{"file", name}, {"bytes", std::filesystem::file_size(path)}, {"sha256", sha256_file(path)}});
  }

  const std::filesystem::path& dir() const { return dir_; }
  const json& list() const { return list_; }

 private:
  std::filesystem::path dir_;
  json list_ = json::array();
};

inline std::string plot_header(const std::string& stem) {
  return "# regenerate with: gnuplot " + stem + ".gp\nset datafile separator ','\nset termoption noenhanced\n"
         "set terminal pngcairo size 1000,700\nset output '" + stem + ".png'\n";
}

inline std::string plot_columns(const std::string& csv, const std::string& xcol, const std::vector<std::string>& ycols) {
  std::string s = "plot ";
  for (std::size_t i = 0; i < ycols.size(); ++i)
    s += (i ? ", \\\n     " : "") + ("'" + csv + "' using '" + xcol + "':'" + ycols[i] + "' with lines title '" +
                                    ycols[i] + "'");
  return s + "\n";
}

inline std::vector<double> physical_z(const ZGrid& line, double theta) {
  std::vector<double> v(line.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = -line.node(n) * std::cos(theta);
  return v;
}

inline BoundaryLine sample_line(const std::function<cplx(double)>& f, const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = f(g.node(n));
  return {g, std::move(v)};
}

/// Image-line field of a boundary amplitude known as a function of the distance along the boundary line.
inline ImageLine propagate_model(const std::function<cplx(double)>& f, const RunConfig& c, const PhysicalParams& p,
                                 const XGrid& x) {
  const BoundaryLine u0 = sample_line(f, ZGrid(c.z_min, c.z_max, c.forward_intervals));
  if (p.theta == 0.0) return fresnel_propagate(u0, p, x);
  std::vector<cplx> v(x.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = inclined_propagate(u0, p, x.node(s), 0.0);
  return {x, std::move(v)};
}

/// The same amplitude seen from the orthogonal (sheared) frame, as a function of the frame coordinate.
inline std::function<cplx(double)> sheared_truth(const std::function<cplx(double)>& f, const PhysicalParams& p) {
  if (!f) return {};
  const double c = std::cos(p.theta), sn = std::sin(p.theta), k = p.wavenumber;
  return [f, c, sn, k](double zeta) {
    const double s = zeta / c;
    return f(s) * std::polar(1.0, 0.5 * k * s * sn * sn / c);
  };
}

inline double rel_l2(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::numeric_limits<double>::quiet_NaN();
}

inline PhysicalParams orthogonal(const PhysicalParams& p) { return PhysicalParams::from_wavelength(p.wavelength); }

}  // namespace detail

/// Boundary amplitudes and image data for every configured model.
inline std::vector<PreparedModel> prepare_models(const RunConfig& c, const PhysicalParams& p, json& assumptions,
                                                 std::vector<std::string>& warnings) {
  std::optional<ImageLine> measured;
  if (c.has_model(ModelKind::file)) measured = load_image_data(c.image_file);
  const XGrid x = measured ? measured->grid() : XGrid(c.x_min, c.x_max, c.x_intervals);
  if (!(x.x_min() > 0.0)) throw DataError("image window must start at x > 0", 1);
  const double zc = c.z_center();
  assumptions["z_c"] = zc;
  assumptions["z_c_rule"] = c.center ? "configured" : "midpoint of [z_min, z_max]";

  std::vector<PreparedModel> out;
  for (ModelKind kind : c.models) {
    PreparedModel m{to_string(kind), {}, ImageLine(x)};
    switch (kind) {
      case ModelKind::gaussian: {
        double xi = c.tilt_value;
        // containment is imposed relative to the boundary line, i.e. in the sheared frame
        if (c.tilt == TiltRule::contained)
          xi = contained_tilt(c.rayleigh_length, std::min(zc - c.z_min, c.z_max - zc), p) +
               p.wavenumber * std::tan(p.theta);
        if (c.tilt == TiltRule::centered) xi = centered_tilt(x.x_min(), x.x_max(), zc, p);
        assumptions["gaussian_xi"] = xi;
        assumptions["gaussian_xi_rule"] =
            c.tilt == TiltRule::contained ? "decays to 1e-8 at the nearer end of the boundary interval, relative to the boundary line"
            : c.tilt == TiltRule::centered ? "footprint centred in the image window"
                                           : "configured";
        // on an inclined line the waist is placed on the line itself, z_c along it
        const double k = p.wavenumber, cs = std::cos(p.theta), sn = std::sin(p.theta);
        const double xc = zc * sn;
        const GaussianBeam b = GaussianBeam::make(c.rayleigh_length, zc * cs, xi, p);
        if (p.theta != 0.0) assumptions["gaussian_waist"] = {xc, -zc * cs};
        m.truth = [b, k, cs, sn, xc](double s) { return b.field(s * sn - xc, -s * cs, k); };
        if (c.gaussian_image == GaussianImage::analytic) {
          std::vector<cplx> v(x.size());
          for (std::size_t i = 0; i < v.size(); ++i) v[i] = b.field(x.node(i) - xc, 0.0, k);
          m.image = ImageLine(x, std::move(v));
        } else {
          m.image = detail::propagate_model(m.truth, c, p, x);
        }
        break;
      }
      case ModelKind::parabolic: {
        const auto b = ParabolicBeam::from_period(c.semi_length, zc, c.period);
        m.truth = [b](double s) { return b.value(s); };
        m.image = detail::propagate_model(m.truth, c, p, x);
        break;
      }
      case ModelKind::step: {
        const auto b = StepBeam::from_period(c.semi_length, zc, c.period);
        m.truth = [b](double s) { return b.value(s); };
        m.image = detail::propagate_model(m.truth, c, p, x);
        break;
      }
      case ModelKind::file:
        m.image = *measured;
        break;
    }
    out.push_back(std::move(m));
  }
  if (c.forward_intervals == c.intervals && (c.has_model(ModelKind::parabolic) || c.has_model(ModelKind::step)))
    warnings.push_back("image data synthesized on the reconstruction grid (forward_intervals == intervals)");
  return out;
}

namespace detail {

inline void write_image(const std::vector<PreparedModel>& models, Artifacts& art) {
  CsvTable t;
  t.add("x", models.front().image.grid().nodes());
  std::vector<std::string> ys;
  for (const auto& m : models) {
    t.add_complex(m.name, m.image.samples());
    ys.push_back(m.name + "_abs2");
  }
  art.write("image.csv", t.str());
  art.write("image.gp", plot_header("image") + "set xlabel 'x'\nset ylabel '|u|^2'\n" + plot_columns("image.csv", "x", ys));
}

inline void write_boundary(const std::vector<PreparedModel>& models, const ZGrid& line, double theta, Artifacts& art) {
  CsvTable t;
  t.add("z", line.nodes());
  t.add("z_phys", physical_z(line, theta));
  std::vector<std::string> ys;
  for (const auto& m : models) {
    if (!m.truth) continue;
    t.add_complex(m.name, sample_line(m.truth, line).samples());
    ys.push_back(m.name + "_abs2");
  }
  if (ys.empty()) return;
  art.write("boundary.csv", t.str());
  art.write("boundary.gp",
            plot_header("boundary") + "set xlabel 'z'\nset ylabel '|u0|^2'\n" + plot_columns("boundary.csv", "z", ys));
}

inline std::string two_panel_plot(const std::string& stem, const std::vector<std::string>& series) {
  std::string s = plot_header(stem) + "set multiplot layout 1,2\nset xlabel 'z'\nset ylabel '|u0|^2'\n";
  std::vector<std::string> a, r;
  for (const auto& n : series) {
    a.push_back(n + "_abs2");
    r.push_back(n + "_re");
  }
  s += plot_columns(stem + ".csv", "z", a) + "set ylabel 'Re u0'\n" + plot_columns(stem + ".csv", "z", r);
  return s + "unset multiplot\n";
}

inline void run_reconstruct(const RunConfig& c, const PhysicalParams& p, const std::vector<PreparedModel>& models,
                            Artifacts& art, json& res) {
  const ZGrid line(c.z_min, c.z_max, c.intervals);
  const ZGrid G = sheared_grid(line, p.theta);
  const PhysicalParams p0 = orthogonal(p);
  const KernelMatrix M = assemble_M(G, c.corner_mode, c.clamp_value);
  const auto T = std::make_shared<const TbcMatrix>(assemble_T(G, p0));
  const Regularization reg{c.reg_mode, c.delta};
  const auto A = std::make_shared<const Eigen::MatrixXcd>(system_matrix(M, reg.alpha()));
  if (c.dump_matrix) {
    dump_matrix(art.dir() / "system_matrix.bin", *A, G, "alpha I - M/(pi i)");
    art.record("system_matrix.bin");
    art.record("system_matrix.bin.txt");
  }
  const Factorization lu(A);
  res["condition_estimate"] = lu.condition_estimate();
  if (lu.singular()) throw NumericalError("system matrix is numerically singular");
  json per = json::object();
  for (const auto& m : models) {
    const ImageLine img = to_sheared_image(m.image, p);
    const InverseSystem direct{A, assemble_g(img, G, p0), reg.alpha(), SystemKind::direct, nullptr, G};
    const InverseSystem coupled{A, assemble_g_prime(img, G, p0), reg.alpha(), SystemKind::tbc_coupled, T, G};
    const Reconstruction r1 = solve(direct, lu), r2 = solve(coupled, lu);
    const BoundaryLine u1 = from_sheared_boundary(r1.u0, line, p), u2 = from_sheared_boundary(r2.u0, line, p);
    CsvTable t;
    t.add("z", line.nodes());
    t.add("z_phys", physical_z(line, p.theta));
    std::vector<std::string> series;
    json entry{{"residual_norm_direct", r1.residual_norm}, {"residual_norm_tbc", r2.residual_norm}};
    if (m.truth) {
      const BoundaryLine truth = sample_line(m.truth, line);
      t.add_complex("truth", truth.samples());
      series.push_back("truth");
      entry["D_thin"] = d_metric(truth, u1, c.mask).D;
    }
    t.add_complex("direct", u1.samples());
    t.add_complex("tbc", u2.samples());
    series.push_back("direct");
    series.push_back("tbc");
    entry["D_thick"] = d_metric(u1, u2, c.mask).D;
    const std::string stem = "reconstruct_" + m.name;
    art.write(stem + ".csv", t.str());
    art.write(stem + ".gp", two_panel_plot(stem, series));
    per[m.name] = entry;
  }
  res["models"] = per;
}

inline void run_special(const RunConfig& c, const PhysicalParams& p, const std::vector<PreparedModel>& models,
                        Artifacts& art, json& res, std::vector<std::string>& warnings) {
  const bool real = c.experiment == ExperimentKind::special_real;
  const ZGrid line(c.z_min, c.z_max, c.intervals);
  const ZGrid G = sheared_grid(line, p.theta);
  const PhysicalParams p0 = orthogonal(p);
  if (p.theta != 0.0)
    warnings.push_back("closed-form recovery assumes purely real or imaginary data in the sheared frame");
  json per = json::object();
  for (const auto& m : models) {
    const ImageLine img = to_sheared_image(m.image, p);
    const BoundaryLine v = real ? solve_special_real(img, p0, G) : solve_special_imag(img, p0, G);
    const BoundaryLine u = from_sheared_boundary(v, line, p);
    CsvTable t;
    t.add("z", line.nodes());
    t.add("z_phys", physical_z(line, p.theta));
    std::vector<std::string> series;
    json entry = json::object();
    if (m.truth) {
      const BoundaryLine truth = sample_line(m.truth, line);
      t.add_complex("truth", truth.samples());
      series.push_back("truth");
      entry["rel_l2_error"] = rel_l2(u.samples(), truth.samples());
    }
    t.add_complex("recovered", u.samples());
    series.push_back("recovered");
    const std::string stem = std::string(real ? "special_real_" : "special_imag_") + m.name;
    art.write(stem + ".csv", t.str());
    art.write(stem + ".gp", two_panel_plot(stem, series));
    per[m.name] = entry;
  }
  res["models"] = per;
}

inline void run_sweep(const RunConfig& c, const PhysicalParams& p, const std::vector<PreparedModel>& models,
                      Artifacts& art, json& res, std::vector<std::string>& warnings) {
  const double cs = std::cos(p.theta);
  SweepSetup s;
  s.params = orthogonal(p);
  s.z_min = c.z_min * cs;
  s.z_max = c.z_max * cs;
  s.intervals = c.intervals;
  s.reg = Regularization{c.reg_mode, c.delta};
  s.corner_mode = c.corner_mode;
  s.clamp_value = c.clamp_value;
  s.mask = c.mask;
  for (const auto& m : models) s.models.push_back({m.name, sheared_truth(m.truth, p), to_sheared_image(m.image, p)});

  std::vector<double> values = sweep_values(c);
  SweepResult r;
  std::string col;
  switch (c.experiment) {
    case ExperimentKind::sweep_tau: {
      std::vector<double> frame(values);
      for (auto& v : frame) v *= cs;
      r = sweep_tau(s, frame);
      for (auto& v : r.realized) v /= cs;
      col = "tau";
      break;
    }
    case ExperimentKind::sweep_delta:
      r = sweep_delta(s, values, c.sweep_mode);
      col = "delta";
      break;
    default:
      r = sweep_xmax(s, values);
      col = "x_max";
      break;
  }
  r.requested = values;

  CsvTable t;
  t.add(col, r.requested);
  t.add(col + "_realized", r.realized);
  std::vector<double> iv(r.intervals.begin(), r.intervals.end());
  t.add("intervals", iv);
  t.add("condition", r.condition);
  std::vector<std::string> ys;
  bool any = false;
  for (const auto& ser : r.series) {
    t.add("D_thin_" + ser.model, ser.D_thin);
    t.add("D_thick_" + ser.model, ser.D_thick);
    ys.push_back("D_thin_" + ser.model);
    ys.push_back("D_thick_" + ser.model);
    for (std::size_t i = 0; i < ser.D_thin.size(); ++i) any = any || std::isfinite(ser.D_thin[i]) || std::isfinite(ser.D_thick[i]);
  }
  const std::string stem = "sweep_" + col;
  art.write(stem + ".csv", t.str());
  const std::string xs = c.experiment == ExperimentKind::sweep_xmax ? "" : "set logscale x\n";
  art.write(stem + ".gp", plot_header(stem) + xs + "set logscale y\nset xlabel '" + col + "'\nset ylabel 'D'\n" +
                              plot_columns(stem + ".csv", col, ys));

  res["parameter"] = col;
  res["requested"] = r.requested;
  res["realized"] = r.realized;
  res["intervals"] = r.intervals;
  res["condition"] = r.condition;
  json d = json::object();
  for (const auto& ser : r.series) d[ser.model] = {{"D_thin", ser.D_thin}, {"D_thick", ser.D_thick}};
  res["D"] = d;
  for (const auto& f : r.failures)
    warnings.push_back("point " + std::to_string(f.index) + (f.model.empty() ? "" : " (" + f.model + ")") + ": " +
                       f.message);
  if (!any) throw NumericalError("no sweep point produced a finite D");
}

}  // namespace detail

/// Executes one configured experiment. Configuration and input-data problems throw ConfigError/DataError,
/// file-system problems throw IoError; numerical failures are reported through exit_code 3 with the
/// manifest written.
inline RunOutcome run(const RunConfig& c) {
  validate(c);
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = c.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  json m;
  m["tool"] = "ipip";
  m["format_version"] = 1;
  m["config"] = to_text(c);
  m["experiment"] = to_string(c.experiment);
  json assumptions = json::object();
  std::vector<std::string> warnings;
  const PhysicalParams p = PhysicalParams::from_wavelength(c.wavelength, c.theta);
  const auto models = prepare_models(c, p, assumptions, warnings);
  const ZGrid line(c.z_min, c.z_max, c.intervals);
  const XGrid& xg = models.front().image.grid();
  const cplx alpha = Regularization{c.reg_mode, c.delta}.alpha();
  m["realized"] = {{"tau", line.step()},
                   {"tau_rule", "(z_max - z_min) / intervals"},
                   {"boundary_intervals", c.intervals},
                   {"h", xg.step()},
                   {"h_rule", "(x_max - x_min) / image intervals"},
                   {"image_intervals", xg.intervals()},
                   {"x_min", xg.x_min()},
                   {"x_max", xg.x_max()},
                   {"alpha", {alpha.real(), alpha.imag()}}};
  if (c.experiment == ExperimentKind::sweep_tau || c.experiment == ExperimentKind::sweep_delta ||
      c.experiment == ExperimentKind::sweep_xmax)
    m["realized"]["sweep_values"] = sweep_values(c);
  m["assumptions"] = assumptions;

  detail::Artifacts art(dir);
  json res = json::object();
  int code = 0;
  try {
    detail::write_image(models, art);
    detail::write_boundary(models, line, p.theta, art);
    switch (c.experiment) {
      case ExperimentKind::forward_only:
        break;
      case ExperimentKind::reconstruct:
        detail::run_reconstruct(c, p, models, art, res);
        break;
      case ExperimentKind::special_real:
      case ExperimentKind::special_imag:
        detail::run_special(c, p, models, art, res, warnings);
        break;
      default:
        detail::run_sweep(c, p, models, art, res, warnings);
        break;
    }
  } catch (const IoError&) {
    throw;
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  } catch (const std::exception& e) {
    code = 3;
    m["error"] = e.what();
  }
  m["results"] = res;
  m["warnings"] = warnings;
  m["status"] = code == 0 ? "ok" : "numerical_failure";
  m["exit_code"] = code;
  m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m["artifacts"] = art.list();
  write_text(dir / "manifest.json", m.dump(2) + "\n");
  return {code, m};
}

/// Configuration embedded in a manifest written by run().
inline RunConfig config_from_manifest(const std::string& text) {
  json m;
  try {
    m = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.contains("config") || !m["config"].is_string()) throw ConfigError("manifest has no config entry");
  return parse_config(m["config"].get<std::string>());
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> n{"fig1", "fig2", "fig3", "fig4", "fig5",
                                          "fig6", "fig7", "fig8", "fig9", "fig10"};
  return n;
}

/// Preset experiments on the default grid (z in [90, 100], N = 2514, x in [2.8284, 28.284], N_x = 2828).
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  auto reg = [&](RegularizationMode m, double d) {
    c.reg_mode = m;
    c.delta = d;
  };
  if (name == "fig1") c.experiment = ExperimentKind::forward_only;
  else if (name == "fig2" || name == "fig3") c.experiment = ExperimentKind::reconstruct;
  else if (name == "fig4") c.experiment = ExperimentKind::sweep_tau;
  else if (name == "fig5") c.experiment = ExperimentKind::reconstruct, reg(RegularizationMode::phase, 0.1);
  else if (name == "fig6") c.experiment = ExperimentKind::sweep_tau, reg(RegularizationMode::phase, 0.1);
  else if (name == "fig7") c.experiment = ExperimentKind::reconstruct, reg(RegularizationMode::shift, 0.01);
  else if (name == "fig8") c.experiment = ExperimentKind::sweep_tau, reg(RegularizationMode::shift, 0.01);
  else if (name == "fig9") {
    c.experiment = ExperimentKind::sweep_delta;
    c.sweep_mode = RegularizationMode::shift;
  } else if (name == "fig10") {
    c.experiment = ExperimentKind::sweep_xmax;
    reg(RegularizationMode::shift, 0.1);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.output_dir = "out/" + name;
  return c;
}

}  // namespace ipip::cli
