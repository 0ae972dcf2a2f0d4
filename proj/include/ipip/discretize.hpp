#pragma once

// Dense discretization of the inverse problem on a ZGrid: the kernel matrix of the
// Cauchy-type equation, the discrete transparent boundary operator, and the
// right-hand sides built from image-line data.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipip/core.hpp"
#include "ipip/forward.hpp"

namespace ipip {

/// gamma_m = 2 / ((sqrt(m) - sqrt(m-1)) (sqrt(m+1) - sqrt(m-1)) (sqrt(m+1) - sqrt(m))).
/// Evaluated through the conjugate sums, which avoids cancellation for large m.
inline double gamma_coefficient(std::size_t m) {
  if (m == 0) throw std::domain_error("gamma_coefficient: m must be >= 1");
  const double a = std::sqrt(double(m - 1));
  const double b = std::sqrt(double(m));
  const double c = std::sqrt(double(m + 1));
  return (b + a) * (c + a) * (c + b);
}

/// Convolution weight of the discrete TBC at lag m >= 1: 2 sqrt(m) - sqrt(m-1) - sqrt(m+1) = 2 / gamma_m.
inline double tbc_weight(std::size_t m) { return 2.0 / gamma_coefficient(m); }

enum class CornerMode { clamp, explicit_unit };

inline const char* to_string(CornerMode m) { return m == CornerMode::clamp ? "clamp" : "explicit_unit"; }

/// Principal-value weights: row n gives sum_m W[n][m] u(z_m) ~= PV int u(zeta) / ((zeta - z_n) sqrt(zeta)) dzeta
/// for the piecewise-linear interpolant of u on [z_min, z_max]. The endpoint diagonal
/// entries (0,0) and (N,N) diverge and are left at zero.
inline Eigen::MatrixXd pv_weights(const ZGrid& grid) {
  const std::size_t N = grid.intervals();
  if (N < 4) throw std::domain_error("pv_weights: need at least 4 intervals");
  const double tau = grid.step();
  std::vector<double> s(N + 1);
  for (std::size_t j = 0; j <= N; ++j) s[j] = std::sqrt(grid.node(j));

  // quad(m): first-difference term of the interpolant, 2/(s_m + s_{m-1}) - 2/(s_{m+1} + s_m)
  auto quad = [&](std::size_t m) { return 4.0 * tau / ((s[m] + s[m - 1]) * (s[m + 1] + s[m - 1]) * (s[m + 1] + s[m])); };

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N + 1, N + 1);
  std::vector<double> la(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const double sn = s[n];
    // la[j] = ln|A_j|, A_j = (s_j - s_n)/(s_j + s_n); z_j - z_n is formed from the index gap
    for (std::size_t j = 0; j <= N; ++j) {
      if (j == n) continue;
      const double gap = std::abs(double(j) - double(n)) * tau;
      la[j] = std::log(gap) - 2.0 * std::log(s[j] + sn);
    }
    const double inv = 1.0 / sn;
    for (std::size_t m = 0; m <= N; ++m) {
      double v = 0.0;
      if ((n == 0 && m == 0) || (n == N && m == N)) {
        v = 0.0;
      } else if (n == N && m == N - 1) {
        v = quad(N - 1) + 2.0 * inv * (la[N - 1] - la[N - 2]);
      } else if (n == N - 1 && m == N) {
        v = 2.0 / (s[N] + s[N - 1]);
      } else if (n == N - 1 && m == N - 1) {
        v = quad(N - 1) + inv * (la[N] - la[N - 2]);
      } else if (n == 0 && m == 1) {
        v = quad(1) + 2.0 * inv * (la[2] - la[1]);
      } else if (n == 1 && m == 0) {
        v = -2.0 / (s[1] + s[0]);
      } else if (n == 1 && m == 1) {
        v = quad(1) + inv * (la[2] - la[0]);
      } else if (m == N) {
        v = 2.0 / (s[N] + s[N - 1]) + (double(n) - double(N) + 1.0) * inv * (la[N] - la[N - 1]);
      } else if (m == 0) {
        v = -2.0 / (s[1] + s[0]) - (double(n) - 1.0) * inv * (la[1] - la[0]);
      } else if (m == n) {
        v = quad(n) + inv * (la[n + 1] - la[n - 1]);
      } else if (m == n + 1) {
        v = quad(n + 1) + 2.0 * inv * (la[n + 2] - la[n + 1]);
      } else if (m + 1 == n) {
        v = quad(n - 1) + 2.0 * inv * (la[n - 1] - la[n - 2]);
      } else {
        const double coef = double(m) - double(n) + 1.0;
        v = quad(m) + coef * inv * (la[m + 1] + la[m - 1] - 2.0 * la[m]) + 2.0 * inv * (la[m] - la[m - 1]);
      }
      W(n, m) = v;
    }
  }
  return W;
}

/// Kernel matrix M of the system (alpha I - M / (pi i)) u0 = g.
///
/// M[n][m] = -sqrt(z_n) * W[n][m] with W the principal-value weights, so that
/// -(1/(pi i)) M u0 discretizes -(i/pi) sqrt(z) PV int u0(zeta) / ((zeta - z) sqrt(zeta)) dzeta.
/// The divergent corners are replaced by -clamp/+clamp (clamp) or -1/+1 (explicit_unit).
struct KernelMatrix {
  Eigen::MatrixXcd entries;
  ZGrid grid;
  CornerMode corner_mode = CornerMode::clamp;
  double clamp_value = 1e8;
};

inline KernelMatrix assemble_M(const ZGrid& grid, CornerMode mode = CornerMode::clamp, double clamp_value = 1e8) {
  if (!(clamp_value > 0.0) || !std::isfinite(clamp_value))
    throw std::domain_error("assemble_M: clamp value must be positive and finite");
  const Eigen::MatrixXd W = pv_weights(grid);
  const std::size_t N = grid.intervals();
  Eigen::MatrixXcd M(N + 1, N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const double scale = -std::sqrt(grid.node(n));
    for (std::size_t m = 0; m <= N; ++m) M(n, m) = cplx(scale * W(n, m), 0.0);
  }
  const double c = mode == CornerMode::clamp ? clamp_value : 1.0;
  M(0, 0) = -c;
  M(N, N) = c;
  if (!M.allFinite()) throw std::runtime_error("assemble_M: non-finite entry");
  return {std::move(M), grid, mode, clamp_value};
}

/// Discrete transparent boundary operator: (T u0)_n ~= du/dx at node n on the boundary line.
///
/// Stored in grid order. Data at physically earlier nodes (larger z) drives node n, so T
/// is upper triangular: T[n][n] = -2 sigma, T[n][m] = 2 sigma w_{m-n} for m > n, where
/// w_j = 2 / gamma_j and sigma = sqrt(2k / (i pi tau)).
struct TbcMatrix {
  Eigen::MatrixXcd entries;
  cplx sigma;
  ZGrid grid;

  /// Same operator acting on the node-reversed vector: entry (n, m) = entries(n, N - m).
  /// In this layout (n, N - n) = -2 sigma and (n, m) = 0 for m > N - n.
  Eigen::MatrixXcd reversed_layout() const { return entries.rowwise().reverse(); }
};

inline TbcMatrix assemble_T(const ZGrid& grid, const PhysicalParams& p) {
  const std::size_t N = grid.intervals();
  const cplx sigma = std::sqrt(cplx(2.0 * p.wavenumber, 0.0) / (I * pi * grid.step()));
  std::vector<double> w(N + 1, 0.0);
  for (std::size_t j = 1; j <= N; ++j) w[j] = tbc_weight(j);
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N + 1, N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    T(n, n) = -2.0 * sigma;
    for (std::size_t m = n + 1; m <= N; ++m) T(n, m) = 2.0 * sigma * w[m - n];
  }
  return {std::move(T), sigma, grid};
}

enum class RhsKind { g, g_prime };

struct RhsVector {
  Eigen::VectorXcd values;
  RhsKind kind = RhsKind::g;
};

namespace detail {

// sum_s w_s f(x_s) u(x_s) exp(-i k x_s^2 / (2 t)) with trapezoid weights w_s (step h included)
template <class Weight>
cplx image_sum(const ImageLine& image, double k, double t, Weight&& weight) {
  const XGrid& xg = image.grid();
  const std::size_t count = xg.size();
  cplx acc{};
  for (std::size_t s = 0; s < count; ++s) {
    const double x = xg.node(s);
    acc += (trapezoid_weight(s, count, xg.step()) * weight(x)) * image[s] * std::polar(1.0, -0.5 * k * x * x / t);
  }
  return acc;
}

}  // namespace detail

/// H(t) = sqrt(2ki/pi) (1/t) int u(x, 0) exp(-i k x^2 / (2t)) dx over the measured window.
inline cplx eval_H(const ImageLine& image, const PhysicalParams& p, double t) {
  if (!(t > 0.0)) throw std::domain_error("eval_H: t must be positive");
  const double k = p.wavenumber;
  return std::sqrt(2.0 * k * I / pi) / t * detail::image_sum(image, k, t, [](double) { return 1.0; });
}

/// g_n = sqrt(2ki / (pi z_n)) * int u(x, 0) exp(-i k x^2 / (2 z_n)) dx.
inline RhsVector assemble_g(const ImageLine& image, const ZGrid& grid, const PhysicalParams& p) {
  const double k = p.wavenumber;
  Eigen::VectorXcd g(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double z = grid.node(n);
    g(n) = std::sqrt(2.0 * k * I / (pi * z)) * detail::image_sum(image, k, z, [](double) { return 1.0; });
  }
  return {std::move(g), RhsKind::g};
}

/// Right-hand side of the equation for du0/dx:
/// g'_n = (ik / z_n) sqrt(2ki / (pi z_n)) * int x u(x, 0) exp(-i k x^2 / (2 z_n)) dx.
inline RhsVector assemble_g_prime(const ImageLine& image, const ZGrid& grid, const PhysicalParams& p) {
  const double k = p.wavenumber;
  Eigen::VectorXcd g(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double z = grid.node(n);
    g(n) = (I * k / z) * std::sqrt(2.0 * k * I / (pi * z)) *
           detail::image_sum(image, k, z, [](double x) { return x; });
  }
  return {std::move(g), RhsKind::g_prime};
}

/// Writes `path` as row-major little-endian (re, im) float64 pairs and `path + ".txt"`
/// with the grid metadata.
inline void dump_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& A, const ZGrid& grid,
                        const std::string& label) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("dump_matrix: cannot open " + path.string());
  auto put = [&](double d) {
    auto bits = std::bit_cast<std::uint64_t>(d);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    bin.write(buf, 8);
  };
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      put(A(r, c).real());
      put(A(r, c).imag());
    }
  if (!bin) throw std::runtime_error("dump_matrix: write failed for " + path.string());

  std::ofstream txt(path.string() + ".txt");
  if (!txt) throw std::runtime_error("dump_matrix: cannot open sidecar for " + path.string());
  txt.precision(17);
  txt << "label = " << label << "\nrows = " << A.rows() << "\ncols = " << A.cols()
      << "\nlayout = row-major little-endian complex128 (re, im)\nz_min = " << grid.z_min()
      << "\nz_max = " << grid.z_max() << "\nintervals = " << grid.intervals() << "\ntau = " << grid.step() << '\n';
  if (!txt) throw std::runtime_error("dump_matrix: sidecar write failed");
}

inline void dump_matrix(const std::filesystem::path& path, const KernelMatrix& M) {
  dump_matrix(path, M.entries, M.grid,
              std::string("M corner_mode=") + to_string(M.corner_mode) + " clamp=" + std::to_string(M.clamp_value));
}

}  // namespace ipip
