#include "uwsvd/geometry.hpp"

#include <cmath>

namespace uwsvd {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Geometry build_geometry(const ArraySpec& array, std::size_t m,
                        std::size_t k_users, std::size_t n_ue,
                        double frequency_hz, double user_line_length_m,
                        double perpendicular_distance_m) {
  if (m == 0 || k_users == 0 || n_ue == 0) {
    throw ValidationError("build_geometry: counts must be positive");
  }
  if (m < k_users * n_ue) {
    throw ValidationError("build_geometry: need m >= k_users * n_ue");
  }
  if (!(frequency_hz > 0.0)) {
    throw ValidationError("build_geometry: frequency must be positive");
  }
  if (array.kind == ArrayKind::kUpa && array.upa_rows * array.upa_cols != m) {
    throw ValidationError("build_geometry: UPA grid does not match m");
  }

  Geometry g;
  g.carrier_frequency_hz = frequency_hz;
  g.wavelength = kSpeedOfLight / frequency_hz;
  const double h = g.wavelength / 2.0;

  g.service_positions.reserve(m);
  if (array.kind == ArrayKind::kUla) {
    const double x0 = -0.5 * static_cast<double>(m - 1) * h;
    for (std::size_t i = 0; i < m; ++i) {
      g.service_positions.push_back({x0 + static_cast<double>(i) * h, 0.0, 0.0});
    }
  } else {
    const double x0 = -0.5 * static_cast<double>(array.upa_cols - 1) * h;
    const double z0 = -0.5 * static_cast<double>(array.upa_rows - 1) * h;
    for (std::size_t r = 0; r < array.upa_rows; ++r) {
      for (std::size_t c = 0; c < array.upa_cols; ++c) {
        g.service_positions.push_back({x0 + static_cast<double>(c) * h, 0.0,
                                       z0 + static_cast<double>(r) * h});
      }
    }
  }

  // Users evenly spaced on the line y = perpendicular distance, with the
  // outermost antennas exactly spanning user_line_length.
  const double antenna_extent = static_cast<double>(n_ue - 1) * h;
  double center_span = user_line_length_m - antenna_extent;
  if (center_span < 0.0) {
    throw ValidationError("build_geometry: user line too short for n_ue");
  }
  g.user_positions.resize(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    const double frac =
        k_users == 1 ? 0.5
                     : static_cast<double>(k) / static_cast<double>(k_users - 1);
    const double center = (frac - 0.5) * center_span;
    auto& antennas = g.user_positions[k];
    antennas.reserve(n_ue);
    const double a0 = center - 0.5 * antenna_extent;
    for (std::size_t i = 0; i < n_ue; ++i) {
      antennas.push_back(
          {a0 + static_cast<double>(i) * h, perpendicular_distance_m, 0.0});
    }
  }
  return g;
}

RealMatrix service_user_distances(const Geometry& g) {
  const std::size_t m = g.service_count();
  const std::size_t n = g.total_user_antennas();
  RealMatrix d(m, n);
  std::size_t col = 0;
  for (const auto& user : g.user_positions) {
    for (const Vec3& ua : user) {
      for (std::size_t i = 0; i < m; ++i) {
        d.at(i, col) = distance(g.service_positions[i], ua);
      }
      ++col;
    }
  }
  return d;
}

RealMatrix pairwise_distances(const std::vector<Vec3>& positions) {
  const std::size_t n = positions.size();
  RealMatrix d(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      d.at(i, j) = distance(positions[i], positions[j]);
    }
  }
  return d;
}

std::vector<Vec3> flattened_user_positions(const Geometry& g) {
  std::vector<Vec3> out;
  out.reserve(g.total_user_antennas());
  for (const auto& user : g.user_positions) {
    out.insert(out.end(), user.begin(), user.end());
  }
  return out;
}

}  // namespace uwsvd
