#pragma once

#include <cstddef>
#include <vector>

#include "uwsvd/types.hpp"

namespace uwsvd {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

/// Small dense real matrix used for distances and correlation inputs.
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c) {}

  double& at(std::size_t r, std::size_t c) { return v[c * rows + r]; }
  double at(std::size_t r, std::size_t c) const { return v[c * rows + r]; }
};

enum class ArrayKind { kUla, kUpa };

struct ArraySpec {
  ArrayKind kind = ArrayKind::kUla;
  std::size_t upa_rows = 0;  // kUpa only; upa_rows * upa_cols == m
  std::size_t upa_cols = 0;
};

/// Service array plus user antenna positions, all half-wavelength spaced.
/// The service array lies in the y = 0 plane (ULA along x, UPA in x-z);
/// users sit on a line parallel to the x axis at the configured
/// perpendicular distance, the whole span of user antennas covering at most
/// user_line_length meters.
struct Geometry {
  std::vector<Vec3> service_positions;            // size m
  std::vector<std::vector<Vec3>> user_positions;  // k_users x n_ue
  double carrier_frequency_hz = 0.0;
  double wavelength = 0.0;

  std::size_t service_count() const { return service_positions.size(); }
  std::size_t user_count() const { return user_positions.size(); }
  std::size_t antennas_per_user() const {
    return user_positions.empty() ? 0 : user_positions.front().size();
  }
  std::size_t total_user_antennas() const {
    return user_count() * antennas_per_user();
  }
  std::vector<std::size_t> partition() const {
    return std::vector<std::size_t>(user_count(), antennas_per_user());
  }
};

Geometry build_geometry(const ArraySpec& array, std::size_t m,
                        std::size_t k_users, std::size_t n_ue,
                        double frequency_hz, double user_line_length_m = 30.0,
                        double perpendicular_distance_m = 15.0);

/// m-by-n matrix of service-antenna to user-antenna distances; user antenna
/// columns are ordered user-major (user k occupies columns [k*n_ue, ...)).
RealMatrix service_user_distances(const Geometry& g);

/// Pairwise distances within one position set (square, zero diagonal).
RealMatrix pairwise_distances(const std::vector<Vec3>& positions);

/// All user antenna positions flattened in user-major order.
std::vector<Vec3> flattened_user_positions(const Geometry& g);

}  // namespace uwsvd
