#pragma once

// Difference metric, parameter sweeps and independent consistency checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipip/core.hpp"
#include "ipip/discretize.hpp"
#include "ipip/solver.hpp"

namespace ipip {

struct DifferenceReport {
  double D = 0.0;                 ///< NaN when the reference is identically zero
  bool defined = true;
  std::size_t counted = 0;        ///< nodes entering the sum
  std::size_t excluded = 0;       ///< nodes below the reference threshold
  double excluded_max_error = 0;  ///< max |u1 - u2| over excluded nodes
  std::string lhs_label;
  std::string rhs_label;
};

/// D = sum_n |u1 - u2|^2 / |u1|^2 over nodes where |u1| > rel_threshold * max|u1|.
/// u1 is the reference.
inline DifferenceReport d_metric(std::span<const cplx> u1, std::span<const cplx> u2, double rel_threshold = 1e-3,
                                 std::string lhs_label = "u1", std::string rhs_label = "u2") {
  if (u1.size() != u2.size()) throw std::invalid_argument("d_metric: length mismatch");
  DifferenceReport r;
  r.lhs_label = std::move(lhs_label);
  r.rhs_label = std::move(rhs_label);
  double peak = 0.0;
  for (const auto& v : u1) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) {
    r.defined = false;
    r.D = std::numeric_limits<double>::quiet_NaN();
    r.excluded = u1.size();
    for (std::size_t n = 0; n < u1.size(); ++n) r.excluded_max_error = std::max(r.excluded_max_error, std::abs(u2[n]));
    return r;
  }
  const double cut = rel_threshold * peak;
  for (std::size_t n = 0; n < u1.size(); ++n) {
    const double a = std::abs(u1[n]);
    const double e = std::abs(u1[n] - u2[n]);
    if (a > cut) {
      r.D += (e * e) / (a * a);
      ++r.counted;
    } else {
      ++r.excluded;
      r.excluded_max_error = std::max(r.excluded_max_error, e);
    }
  }
  return r;
}

inline DifferenceReport d_metric(const BoundaryLine& u1, const BoundaryLine& u2, double rel_threshold = 1e-3,
                                 std::string lhs_label = "u1", std::string rhs_label = "u2") {
  if (!(u1.grid() == u2.grid())) throw std::invalid_argument("d_metric: lines live on different grids");
  return d_metric(u1.samples(), u2.samples(), rel_threshold, std::move(lhs_label), std::move(rhs_label));
}

/// ||T u0 - du0|| / ||du0||; empty when du0 is identically zero.
inline std::optional<double> tbc_residual(const TbcMatrix& T, const BoundaryLine& u0, const BoundaryLine& du0) {
  if (u0.size() != du0.size() || static_cast<Eigen::Index>(u0.size()) != T.entries.rows())
    throw std::invalid_argument("tbc_residual: dimension mismatch");
  Eigen::Map<const Eigen::VectorXcd> u(u0.samples().data(), u0.size());
  Eigen::Map<const Eigen::VectorXcd> d(du0.samples().data(), du0.size());
  const double nd = d.norm();
  if (nd == 0.0) return std::nullopt;
  return (T.entries.triangularView<Eigen::Upper>() * u - d).norm() / nd;
}

inline std::optional<double> tbc_residual(const BoundaryLine& u0, const BoundaryLine& du0, const PhysicalParams& p) {
  if (!(u0.grid() == du0.grid())) throw std::invalid_argument("tbc_residual: lines live on different grids");
  return tbc_residual(assemble_T(u0.grid(), p), u0, du0);
}

/// Max-norm of 2ik u_z + u_xx on the interior of a patch, centred differences.
/// patch(j, i) holds u(x_0 + i dx, z_0 + j dz).
inline double pwe_residual(const Eigen::MatrixXcd& patch, const PhysicalParams& p, double dx, double dz) {
  if (patch.rows() < 3 || patch.cols() < 3) throw std::invalid_argument("pwe_residual: patch smaller than 3x3");
  if (!(dx > 0.0) || !(dz > 0.0)) throw std::invalid_argument("pwe_residual: steps must be positive");
  const cplx two_ik = 2.0 * I * p.wavenumber;
  double worst = 0.0;
  for (Eigen::Index j = 1; j + 1 < patch.rows(); ++j)
    for (Eigen::Index i = 1; i + 1 < patch.cols(); ++i) {
      const cplx uz = (patch(j + 1, i) - patch(j - 1, i)) / (2.0 * dz);
      const cplx uxx = (patch(j, i + 1) - 2.0 * patch(j, i) + patch(j, i - 1)) / (dx * dx);
      worst = std::max(worst, std::abs(two_ik * uz + uxx));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Sweeps

/// One model entering a sweep: its pre-specified boundary amplitude (empty when unknown, e.g. for
/// measured data; D_thin is then NaN) and its image data on the full measurement window.
struct ModelCase {
  std::string name;
  std::function<cplx(double z)> boundary;
  ImageLine image;
};

struct SweepSetup {
  PhysicalParams params;
  double z_min = 0.0;
  double z_max = 0.0;
  std::size_t intervals = 0;  ///< boundary grid for delta and x_max sweeps
  Regularization reg;         ///< used by tau and x_max sweeps
  CornerMode corner_mode = CornerMode::clamp;
  double clamp_value = 1e8;
  double mask = 1e-3;
  std::vector<ModelCase> models;
};

enum class SweepParameter { tau, delta, x_max };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::tau: return "tau";
    case SweepParameter::delta: return "delta";
    case SweepParameter::x_max: return "x_max";
  }
  return "?";
}

struct SweepSeries {
  std::string model;
  std::vector<double> D_thin;   ///< direct solution vs pre-specified amplitude
  std::vector<double> D_thick;  ///< direct solution vs TBC-coupled solution
};

struct SweepFailure {
  std::size_t index;
  std::string model;
  std::string message;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::tau;
  std::vector<double> requested;
  std::vector<double> realized;
  std::vector<std::size_t> intervals;
  std::vector<double> condition;
  std::vector<SweepSeries> series;
  std::vector<SweepFailure> failures;
};

namespace detail {

inline SweepResult make_result(SweepParameter p, const SweepSetup& setup, std::size_t points) {
  if (setup.models.empty()) throw std::invalid_argument("sweep: no models");
  SweepResult r;
  r.parameter = p;
  r.realized.assign(points, std::numeric_limits<double>::quiet_NaN());
  r.intervals.assign(points, 0);
  r.condition.assign(points, std::numeric_limits<double>::quiet_NaN());
  for (const auto& m : setup.models)
    r.series.push_back({m.name, std::vector<double>(points, std::numeric_limits<double>::quiet_NaN()),
                        std::vector<double>(points, std::numeric_limits<double>::quiet_NaN())});
  return r;
}

inline BoundaryLine sample(const std::function<cplx(double)>& f, const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = f(g.node(n));
  return {g, std::move(v)};
}

// Solves both systems for every model at one sweep point. `images[i]` may be a truncated
// window of setup.models[i].image.
inline void sweep_point(const SweepSetup& setup, const ZGrid& grid, const Factorization& lu,
                        const std::shared_ptr<const Eigen::MatrixXcd>& A, const std::shared_ptr<const TbcMatrix>& T,
                        const Regularization& reg, const std::vector<const ImageLine*>& images, std::size_t idx,
                        SweepResult& out) {
  out.condition[idx] = lu.condition_estimate();
  for (std::size_t i = 0; i < setup.models.size(); ++i) {
    const ModelCase& mc = setup.models[i];
    try {
      const ImageLine& img = *images[i];
      InverseSystem direct{A, assemble_g(img, grid, setup.params), reg.alpha(), SystemKind::direct, nullptr, grid};
      InverseSystem coupled{A, assemble_g_prime(img, grid, setup.params), reg.alpha(), SystemKind::tbc_coupled, T,
                            grid};
      const Reconstruction r1 = solve(direct, lu);
      const Reconstruction r2 = solve(coupled, lu);
      const auto thick = d_metric(r1.u0, r2.u0, setup.mask);
      out.series[i].D_thick[idx] = thick.D;
      bool defined = thick.defined;
      if (mc.boundary) {
        const auto thin = d_metric(sample(mc.boundary, grid), r1.u0, setup.mask);
        out.series[i].D_thin[idx] = thin.D;
        defined = defined && thin.defined;
      }
      if (!defined)
        out.failures.push_back({idx, mc.name, "reference amplitude identically zero, D undefined"});
    } catch (const std::exception& e) {
      out.failures.push_back({idx, mc.name, e.what()});
    }
  }
}

inline void sweep_point(const SweepSetup& setup, const KernelMatrix& M, const std::shared_ptr<const TbcMatrix>& T,
                        const Regularization& reg, const std::vector<const ImageLine*>& images, std::size_t idx,
                        SweepResult& out) {
  const auto A = std::make_shared<const Eigen::MatrixXcd>(system_matrix(M, reg.alpha()));
  const Factorization lu(A);
  sweep_point(setup, M.grid, lu, A, T, reg, images, idx, out);
}

inline std::vector<const ImageLine*> full_images(const SweepSetup& setup) {
  std::vector<const ImageLine*> v;
  for (const auto& m : setup.models) v.push_back(&m.image);
  return v;
}

}  // namespace detail

/// Nearest admissible interval count for a requested step.
inline std::size_t intervals_for_step(double z_min, double z_max, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("step must be positive");
  const double n = std::round((z_max - z_min) / tau);
  return static_cast<std::size_t>(std::max(4.0, n));
}

/// D_thin and D_thick versus the boundary step tau; each tau is realized as (z_max - z_min) / N.
inline SweepResult sweep_tau(const SweepSetup& setup, const std::vector<double>& tau_values) {
  SweepResult out = detail::make_result(SweepParameter::tau, setup, tau_values.size());
  out.requested = tau_values;
  const auto images = detail::full_images(setup);
  for (std::size_t idx = 0; idx < tau_values.size(); ++idx) {
    try {
      const ZGrid grid(setup.z_min, setup.z_max, intervals_for_step(setup.z_min, setup.z_max, tau_values[idx]));
      out.realized[idx] = grid.step();
      out.intervals[idx] = grid.intervals();
      const KernelMatrix M = assemble_M(grid, setup.corner_mode, setup.clamp_value);
      const auto T = std::make_shared<const TbcMatrix>(assemble_T(grid, setup.params));
      detail::sweep_point(setup, M, T, setup.reg, images, idx, out);
    } catch (const std::exception& e) {
      out.failures.push_back({idx, "", e.what()});
    }
  }
  return out;
}

/// D versus the regularization deviation delta at fixed grid.
inline SweepResult sweep_delta(const SweepSetup& setup, const std::vector<double>& delta_values,
                               RegularizationMode mode) {
  if (mode == RegularizationMode::unit) throw std::invalid_argument("sweep_delta: mode must be phase or shift");
  SweepResult out = detail::make_result(SweepParameter::delta, setup, delta_values.size());
  out.requested = delta_values;
  const ZGrid grid(setup.z_min, setup.z_max, setup.intervals);
  const KernelMatrix M = assemble_M(grid, setup.corner_mode, setup.clamp_value);
  const auto T = std::make_shared<const TbcMatrix>(assemble_T(grid, setup.params));
  const auto images = detail::full_images(setup);
  for (std::size_t idx = 0; idx < delta_values.size(); ++idx) {
    out.intervals[idx] = grid.intervals();
    try {
      if (!(delta_values[idx] >= 0.0)) throw std::domain_error("delta must be non-negative");
      out.realized[idx] = delta_values[idx];
      detail::sweep_point(setup, M, T, Regularization{mode, delta_values[idx]}, images, idx, out);
    } catch (const std::exception& e) {
      out.failures.push_back({idx, "", e.what()});
    }
  }
  return out;
}

/// Image data restricted to nodes with x <= x_max.
inline ImageLine truncate_window(const ImageLine& image, double x_max) {
  const XGrid& g = image.grid();
  if (!(x_max > g.x_min())) throw std::domain_error("truncate_window: x_max must exceed x_min");
  const double pos = (x_max - g.x_min()) / g.step();
  auto last = static_cast<std::size_t>(std::floor(pos + 1e-9));
  last = std::min(last, g.intervals());
  if (last < 2) throw std::domain_error("truncate_window: fewer than 3 nodes left");
  const XGrid tg(g.x_min(), g.node(last), last);
  std::vector<cplx> v(image.samples().begin(), image.samples().begin() + static_cast<std::ptrdiff_t>(last + 1));
  return {tg, std::move(v)};
}

/// D versus the upper limit of the image window; M, T and the factorization are shared.
inline SweepResult sweep_xmax(const SweepSetup& setup, const std::vector<double>& xmax_values) {
  SweepResult out = detail::make_result(SweepParameter::x_max, setup, xmax_values.size());
  out.requested = xmax_values;
  const ZGrid grid(setup.z_min, setup.z_max, setup.intervals);
  const KernelMatrix M = assemble_M(grid, setup.corner_mode, setup.clamp_value);
  const auto T = std::make_shared<const TbcMatrix>(assemble_T(grid, setup.params));
  const auto A = std::make_shared<const Eigen::MatrixXcd>(system_matrix(M, setup.reg.alpha()));
  const Factorization lu(A);
  for (std::size_t idx = 0; idx < xmax_values.size(); ++idx) {
    out.intervals[idx] = grid.intervals();
    try {
      std::vector<ImageLine> cut;
      cut.reserve(setup.models.size());
      for (const auto& m : setup.models) cut.push_back(truncate_window(m.image, xmax_values[idx]));
      out.realized[idx] = cut.front().grid().x_max();
      std::vector<const ImageLine*> ptrs;
      for (const auto& c : cut) ptrs.push_back(&c);
      detail::sweep_point(setup, grid, lu, A, T, setup.reg, ptrs, idx, out);
    } catch (const std::exception& e) {
      out.failures.push_back({idx, "", e.what()});
    }
  }
  return out;
}

}  // namespace ipip
