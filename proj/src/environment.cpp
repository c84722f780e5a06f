#include "acompc/environment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "acompc/error.hpp"
#include "acompc/rng.hpp"
#include "acompc/serialization.hpp"

namespace acompc {

namespace {

void check_field(const Field& f, const char* name, Eigen::Index rows, Eigen::Index cols) {
  if (f.rows() != rows || f.cols() != cols) {
    std::ostringstream msg;
    msg << "environment: " << name << " is " << f.rows() << "x" << f.cols() << ", expected " << rows << "x" << cols;
    throw ValidationError(msg.str());
  }
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!std::isfinite(f(r, c)) || f(r, c) < 0.0) {
        std::ostringstream msg;
        msg << "environment: " << name << "[row " << r << "][col " << c << "] = " << f(r, c)
            << " must be finite and >= 0";
        throw ValidationError(msg.str());
      }
}

void add_bump(Field& field, const GaussianBump& b) {
  const double inv = 1.0 / (2.0 * b.width * b.width);
  for (Eigen::Index r = 0; r < field.rows(); ++r) {
    const double dy = static_cast<double>(r) + 0.5 - b.center_row;
    for (Eigen::Index c = 0; c < field.cols(); ++c) {
      const double dx = static_cast<double>(c) + 0.5 - b.center_col;
      field(r, c) += b.amplitude * std::exp(-(dx * dx + dy * dy) * inv);
    }
  }
}

void validate_field_spec(const FieldSpec& f, const char* name) {
  auto fail = [&](const std::string& what) { throw ValidationError(std::string("env spec ") + name + ": " + what); };
  if (!std::isfinite(f.base) || f.base < 0.0) fail("base must be finite and >= 0");
  if (f.random_count < 0) fail("random_count must be >= 0");
  if (!(f.amplitude_min >= 0.0 && f.amplitude_min <= f.amplitude_max && std::isfinite(f.amplitude_max)))
    fail("amplitude range must satisfy 0 <= min <= max");
  if (!(f.width_min > 0.0 && f.width_min <= f.width_max && std::isfinite(f.width_max)))
    fail("width range must satisfy 0 < min <= max");
  for (const auto& b : f.bumps)
    if (!(b.amplitude >= 0.0) || !(b.width > 0.0) || !std::isfinite(b.center_col) || !std::isfinite(b.center_row) ||
        !std::isfinite(b.amplitude) || !std::isfinite(b.width))
      fail("bumps need finite centers, amplitude >= 0 and width > 0");
}

Field make_field(const FieldSpec& spec, int n_x, int n_y, Rng& rng) {
  Field f = Field::Constant(n_y, n_x, spec.base);
  for (const auto& b : spec.bumps) add_bump(f, b);
  for (int i = 0; i < spec.random_count; ++i) {
    GaussianBump b;
    b.center_col = rng.uniform(0.0, n_x);
    b.center_row = rng.uniform(0.0, n_y);
    b.amplitude = rng.uniform(spec.amplitude_min, spec.amplitude_max);
    b.width = rng.uniform(spec.width_min, spec.width_max);
    add_bump(f, b);
  }
  return f;
}

}  // namespace

GridEnvironment::GridEnvironment(double cell_size_km, Field polar, Field wind, ObstacleMask obstacles, Field cost)
    : cell_size_(cell_size_km),
      polar_(std::move(polar)),
      wind_(std::move(wind)),
      obstacles_(std::move(obstacles)),
      cost_(std::move(cost)) {
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) throw ValidationError("environment: cell_size must be > 0");
  const Eigen::Index rows = polar_.rows();
  const Eigen::Index cols = polar_.cols();
  if (rows < 2 || cols < 2) throw ValidationError("environment: n_x and n_y must be >= 2");
  check_field(polar_, "polar", rows, cols);
  check_field(wind_, "wind", rows, cols);
  check_field(cost_, "cost", rows, cols);
  if (obstacles_.rows() != rows || obstacles_.cols() != cols)
    throw ValidationError("environment: obstacles dimensions differ from the maps");
  min_free_cost_ = std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  Eigen::Index free_count = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (obstacles_(r, c) > 1) {
        std::ostringstream msg;
        msg << "environment: obstacles[row " << r << "][col " << c << "] = " << int{obstacles_(r, c)}
            << " must be 0 or 1";
        throw ValidationError(msg.str());
      }
      if (obstacles_(r, c) == 0) {
        min_free_cost_ = std::min(min_free_cost_, cost_(r, c));
        free_sum += cost_(r, c);
        ++free_count;
      }
    }
  if (!std::isfinite(min_free_cost_)) min_free_cost_ = 0.0;
  mean_free_cost_ = free_count ? free_sum / static_cast<double>(free_count) : 0.0;
}

GridEnvironment GridEnvironment::with_cost(Field cost) const {
  return GridEnvironment(cell_size_, polar_, wind_, obstacles_, std::move(cost));
}

bool operator==(const GridEnvironment& a, const GridEnvironment& b) {
  return a.cell_size_ == b.cell_size_ && a.polar_ == b.polar_ && a.wind_ == b.wind_ && a.obstacles_ == b.obstacles_ &&
         a.cost_ == b.cost_;
}

void validate(const EnvSpec& spec) {
  if (spec.n_x <= 1 || spec.n_y <= 1) throw ValidationError("env spec: n_x and n_y must be >= 2");
  if (!(spec.cell_size_km > 0.0) || !std::isfinite(spec.cell_size_km))
    throw ValidationError("env spec: cell_size_km must be > 0");
  validate_field_spec(spec.polar, "polar");
  validate_field_spec(spec.wind, "wind");
  for (std::size_t i = 0; i < spec.obstacles.size(); ++i) {
    const auto& o = spec.obstacles[i];
    if (o.col0 < 0 || o.row0 < 0 || o.col1 >= spec.n_x || o.row1 >= spec.n_y || o.col0 > o.col1 || o.row0 > o.row1) {
      std::ostringstream msg;
      msg << "env spec: obstacles[" << i << "] = [" << o.col0 << ", " << o.row0 << ", " << o.col1 << ", " << o.row1
          << "] lies outside the " << spec.n_x << "x" << spec.n_y << " grid or is empty";
      throw ValidationError(msg.str());
    }
  }
}

GridEnvironment generate_environment(const EnvSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, {0x656e76}));
  Field polar = make_field(spec.polar, spec.n_x, spec.n_y, rng);
  Field wind = make_field(spec.wind, spec.n_x, spec.n_y, rng);
  ObstacleMask mask = ObstacleMask::Zero(spec.n_y, spec.n_x);
  for (const auto& o : spec.obstacles)
    mask.block(o.row0, o.col0, o.row1 - o.row0 + 1, o.col1 - o.col0 + 1).setOnes();
  return GridEnvironment(spec.cell_size_km, std::move(polar), std::move(wind), std::move(mask),
                         Field::Zero(spec.n_y, spec.n_x));
}

GridEnvironment apply_cost_model(const GridEnvironment& env, const EnergyModelCoefficients& coeffs, double cost_floor) {
  const auto b = coeffs.as_basis();
  if (!b.allFinite()) throw ModelError("cost model: coefficients must be finite");
  if (!std::isfinite(cost_floor) || cost_floor < 0.0) throw ModelError("cost model: cost_floor must be finite and >= 0");
  const Field raw = predict_map(coeffs, env.polar(), env.wind());
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c)
      if (!std::isfinite(raw(r, c))) {
        std::ostringstream msg;
        msg << "cost model: non-finite cost at row " << r << ", col " << c;
        throw ModelError(msg.str());
      }
  return env.with_cost(raw.cwiseMax(cost_floor));
}

std::string environment_digest(const GridEnvironment& env) {
  const std::string text = environment_to_json(env).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace acompc
