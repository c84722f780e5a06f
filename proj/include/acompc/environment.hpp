#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acompc/energy_model.hpp"

namespace acompc {

using Field = Eigen::MatrixXd;
using ObstacleMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Cell index pair. Row 0 is the top of the grid.
struct GridPos {
  int col = 0;
  int row = 0;

  friend constexpr bool operator==(GridPos, GridPos) = default;
  friend constexpr GridPos operator+(GridPos a, GridPos b) { return {a.col + b.col, a.row + b.row}; }
  friend constexpr GridPos operator-(GridPos a, GridPos b) { return {a.col - b.col, a.row - b.row}; }
};

/// Discretized sea surface. Immutable once constructed; every constructor
/// path validates the shared-dimension and value-range invariants.
class GridEnvironment {
public:
  /// Maps are n_y x n_x (rows x cols). Throws ValidationError on any invariant violation.
  GridEnvironment(double cell_size_km, Field polar, Field wind, ObstacleMask obstacles, Field cost);

  int n_x() const { return static_cast<int>(polar_.cols()); }
  int n_y() const { return static_cast<int>(polar_.rows()); }
  double cell_size() const { return cell_size_; }

  const Field& polar() const { return polar_; }
  const Field& wind() const { return wind_; }
  const ObstacleMask& obstacles() const { return obstacles_; }
  const Field& cost() const { return cost_; }

  double cost_at(GridPos p) const { return cost_(p.row, p.col); }
  bool in_bounds(GridPos p) const { return p.col >= 0 && p.row >= 0 && p.col < n_x() && p.row < n_y(); }
  bool is_obstacle(GridPos p) const { return obstacles_(p.row, p.col) != 0; }

  /// Smallest cost over obstacle-free cells (0 when every cell is blocked).
  double min_free_cost() const { return min_free_cost_; }
  double mean_free_cost() const { return mean_free_cost_; }

  /// Copy with a replaced cost map.
  GridEnvironment with_cost(Field cost) const;

  friend bool operator==(const GridEnvironment& a, const GridEnvironment& b);

private:
  double cell_size_;
  Field polar_;
  Field wind_;
  ObstacleMask obstacles_;
  Field cost_;
  double min_free_cost_ = 0.0;
  double mean_free_cost_ = 0.0;
};

/// In-bounds and obstacle-free.
inline bool is_valid(const GridEnvironment& env, GridPos p) {
  return env.in_bounds(p) && !env.is_obstacle(p);
}

struct GaussianBump {
  double center_col = 0.0;  // continuous cell coordinates; cell (c, r) has center (c + 0.5, r + 0.5)
  double center_row = 0.0;
  double amplitude = 0.0;
  double width = 1.0;  // standard deviation in cells
};

/// A smooth field: constant base plus explicit bumps plus `random_count`
/// bumps with seeded centers and amplitude/width drawn from the given ranges.
struct FieldSpec {
  double base = 0.0;
  std::vector<GaussianBump> bumps;
  int random_count = 0;
  double amplitude_min = 0.0;
  double amplitude_max = 1.0;
  double width_min = 1.0;
  double width_max = 5.0;
};

/// Inclusive cell rectangle [col0, col1] x [row0, row1].
struct ObstacleRect {
  int col0 = 0;
  int row0 = 0;
  int col1 = 0;
  int row1 = 0;
};

struct EnvSpec {
  int n_x = 50;
  int n_y = 50;
  double cell_size_km = 1.0;
  FieldSpec polar;
  FieldSpec wind;
  std::vector<ObstacleRect> obstacles;
  std::uint64_t seed = 0;
};

void validate(const EnvSpec& spec);

/// Pure function of `spec`; the cost map is left at zero.
GridEnvironment generate_environment(const EnvSpec& spec);

/// cost = max(polar*g1 + wind*g2 + wind^3*g3 + g4, cost_floor), cellwise.
/// Throws ModelError naming the first cell whose unclamped value is not finite.
GridEnvironment apply_cost_model(const GridEnvironment& env, const EnergyModelCoefficients& coeffs,
                                 double cost_floor = 0.0);

/// FNV-1a digest of the canonical serialized form, as 16 hex digits.
std::string environment_digest(const GridEnvironment& env);

}  // namespace acompc
