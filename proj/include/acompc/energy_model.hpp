#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "acompc/error.hpp"

namespace acompc {

// Both models share the basis {feature, v, v^3, 1}; they differ only in what
// the feature is (polar strength or irradiance) and in field naming.

template <typename Scalar>
using Basis4 = Eigen::Matrix<Scalar, 4, 1>;

/// Per-km energy consumption model over (polar strength, wind speed).
template <typename Scalar>
struct EnergyModelCoefficientsT {
  Scalar polar{0};       // per polar unit
  Scalar wind{0};        // per m/s
  Scalar wind_cubed{0};  // per (m/s)^3
  Scalar intercept{0};

  Basis4<Scalar> as_basis() const { return {polar, wind, wind_cubed, intercept}; }
  static EnergyModelCoefficientsT from_basis(const Basis4<Scalar>& b) { return {b(0), b(1), b(2), b(3)}; }
  friend bool operator==(const EnergyModelCoefficientsT&, const EnergyModelCoefficientsT&) = default;
};

/// Renewable generation model over (irradiance, wind speed), in kW.
template <typename Scalar>
struct RenewableModelCoefficientsT {
  Scalar intercept{0};
  Scalar irradiance{0};
  Scalar wind{0};
  Scalar wind_cubed{0};

  Basis4<Scalar> as_basis() const { return {irradiance, wind, wind_cubed, intercept}; }
  static RenewableModelCoefficientsT from_basis(const Basis4<Scalar>& b) { return {b(3), b(0), b(1), b(2)}; }
  friend bool operator==(const RenewableModelCoefficientsT&, const RenewableModelCoefficientsT&) = default;
};

using EnergyModelCoefficients = EnergyModelCoefficientsT<double>;
using RenewableModelCoefficients = RenewableModelCoefficientsT<double>;

/// Total renewable output of the reference hybrid solar/wind plant:
/// P = -166.3272 + 15 Irr + 51.7979 v - 0.047 v^3.
inline constexpr RenewableModelCoefficients kReferenceRenewableModel{-166.3272, 15.0, 51.7979, -0.047};

template <typename Scalar>
Basis4<Scalar> basis_row(Scalar feature, Scalar v) {
  return {feature, v, v * v * v, Scalar{1}};
}

template <typename Scalar>
Scalar predict(const EnergyModelCoefficientsT<Scalar>& c, Scalar polar, Scalar v) {
  return c.polar * polar + c.wind * v + c.wind_cubed * v * v * v + c.intercept;
}

template <typename Scalar>
Scalar predict(const RenewableModelCoefficientsT<Scalar>& c, Scalar irradiance, Scalar v) {
  return c.intercept + c.irradiance * irradiance + c.wind * v + c.wind_cubed * v * v * v;
}

/// Cellwise evaluation over whole maps; no clamping.
template <typename Scalar, typename DerivedF, typename DerivedV>
auto predict_map(const EnergyModelCoefficientsT<Scalar>& c, const Eigen::DenseBase<DerivedF>& feature,
                 const Eigen::DenseBase<DerivedV>& wind) {
  const auto v = wind.derived().array();
  return (c.polar * feature.derived().array() + c.wind * v + c.wind_cubed * v.cube() + c.intercept).matrix();
}

inline constexpr double kMaxDesignCondition = 1e10;

template <typename Scalar>
struct LeastSquaresSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
  Scalar residual_norm{0};
  Scalar condition{0};  // 2-norm condition number of the design matrix
};

/// Least-squares solve via column-pivoted Householder QR.
///
/// Rejects designs that are rank deficient or whose condition number exceeds
/// kMaxDesignCondition with DegenerateDesignError.
template <typename DerivedA, typename DerivedB>
LeastSquaresSolution<typename DerivedA::Scalar> solve_least_squares(const Eigen::MatrixBase<DerivedA>& design,
                                                                    const Eigen::MatrixBase<DerivedB>& response) {
  using Scalar = typename DerivedA::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  if (design.rows() != response.rows()) throw ValidationError("least squares: design and response row counts differ");
  if (design.rows() < design.cols() || design.cols() == 0)
    throw DegenerateDesignError("least squares: fewer rows than unknowns");
  if (!design.allFinite() || !response.allFinite()) throw ValidationError("least squares: non-finite input");

  const Matrix a = design;
  const Vector b = response;

  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  const Scalar smax = sv(0);
  const Scalar smin = sv(sv.size() - 1);
  const Scalar cond = smin > Scalar{0} ? smax / smin : std::numeric_limits<Scalar>::infinity();

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < a.cols() || !(cond <= Scalar{kMaxDesignCondition}))
    throw DegenerateDesignError("least squares: degenerate design (rank " + std::to_string(qr.rank()) + " of " +
                                std::to_string(a.cols()) + ", condition " + std::to_string(static_cast<double>(cond)) +
                                ")");

  LeastSquaresSolution<Scalar> out;
  out.coefficients = qr.solve(b);
  out.residual_norm = (b - a * out.coefficients).norm();
  out.condition = cond;
  return out;
}

/// One observation: feature (polar strength or irradiance), wind speed, response.
struct Sample {
  double feature = 0.0;
  double wind = 0.0;
  double response = 0.0;
};

using SampleSet = std::vector<Sample>;

template <typename Coefficients>
struct ModelFit {
  Coefficients coefficients;
  double residual_norm = 0.0;
  double condition = 0.0;
};

/// Fit on the basis {feature, v, v^3, 1}; returned vector is in that order.
LeastSquaresSolution<double> fit_linear_model(const SampleSet& samples);
ModelFit<EnergyModelCoefficients> fit_energy_model(const SampleSet& samples);
ModelFit<RenewableModelCoefficients> fit_renewable_model(const SampleSet& samples);

/// Delimited text, `feature, wind, response` per line; `#` lines and blank
/// lines ignored; commas and/or whitespace separate fields.
SampleSet read_samples(std::istream& in);
SampleSet read_samples_file(const std::string& path);

}  // namespace acompc
