#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vortex {

// Inverse distance between a probe point at radius r' and an atomic electron
// at radius q, separated by azimuth phi:
//   F = [r'^2 + q^2 - 2 r' q cos phi]^(-1/2).
// Throws DomainError at the coincidence point (r' = q, cos phi = 1).
double kernel_F(double r_prime, double q, double phi);

// Azimuthal Fourier coefficient K_lambda(r', q) = int_0^2pi cos(lambda phi) F dphi,
// by adaptive quadrature to relative tolerance `tol`. K is real and even in
// lambda. Diverges logarithmically on r' = q, which is rejected.
double kernel_fourier(int lambda, double r_prime, double q, double tol);

// int_0^2pi e^{i(lambda + alpha) phi_q} dphi_q: 2 pi when lambda = -alpha,
// else exactly zero.
double azimuthal_selection(int lambda, int alpha);

namespace testing {
// Negative-control hook: when set, azimuthal_selection fires on
// lambda = +alpha instead of lambda = -alpha.
void set_selection_tamper(bool on);
bool selection_tampered();
} // namespace testing

struct GridSpec {
  int points = 2;
  double min = 0.0;
  double max = 1.0;

  double step() const { return (max - min) / (points - 1); }
  double at(int i) const { return min + i * step(); }
  friend bool operator==(const GridSpec &, const GridSpec &) = default;
};

// Precomputed K_lambda on a rectangular (r', q) grid. Lookups use bilinear
// interpolation away from the diagonal and fall back to direct quadrature
// within two cells of r' = q or outside the grid.
//
// On-disk format (text, version 1):
//   vortex-kernel-table 1
//   code_version <string>
//   lambda <int>
//   tol <double>
//   r_grid <points> <min> <max>
//   q_grid <points> <min> <max>
//   checksum <16 hex digits, FNV-1a 64 of the values block>
//   values
//   <r_grid.points lines, each q_grid.points numbers; "nan" on the diagonal>
class KernelCoefficientTable {
public:
  static KernelCoefficientTable build(int lambda, GridSpec r_grid,
                                      GridSpec q_grid, double tol,
                                      int threads = 1);

  int lambda() const { return lambda_; }
  double tol() const { return tol_; }
  const GridSpec &r_grid() const { return r_grid_; }
  const GridSpec &q_grid() const { return q_grid_; }
  double value(int i, int j) const {
    return values_[static_cast<std::size_t>(i) *
                       static_cast<std::size_t>(q_grid_.points) +
                   static_cast<std::size_t>(j)];
  }

  double interpolate(double r_prime, double q) const;

  std::uint64_t checksum() const;
  void save(std::ostream &os) const;
  // Throws ValidationError on malformed input, version or checksum mismatch.
  static KernelCoefficientTable load(std::istream &is);

private:
  std::string values_block() const;

  int lambda_ = 0;
  double tol_ = 1e-10;
  GridSpec r_grid_, q_grid_;
  std::vector<double> values_;
};

} // namespace vortex
