#include "acompc/energy_model.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace acompc {

LeastSquaresSolution<double> fit_linear_model(const SampleSet& samples) {
  if (samples.size() < 4)
    throw DegenerateDesignError("fit: need at least 4 samples, got " + std::to_string(samples.size()));
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd response(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    design.row(i) = basis_row(s.feature, s.wind).transpose();
    response(i) = s.response;
  }
  return solve_least_squares(design, response);
}

ModelFit<EnergyModelCoefficients> fit_energy_model(const SampleSet& samples) {
  const auto sol = fit_linear_model(samples);
  return {EnergyModelCoefficients::from_basis(sol.coefficients), sol.residual_norm, sol.condition};
}

ModelFit<RenewableModelCoefficients> fit_renewable_model(const SampleSet& samples) {
  const auto sol = fit_linear_model(samples);
  return {RenewableModelCoefficients::from_basis(sol.coefficients), sol.residual_norm, sol.condition};
}

SampleSet read_samples(std::istream& in) {
  SampleSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (char& ch : line)
      if (ch == ',' || ch == ';') ch = ' ';
    std::istringstream fields(line);
    double values[3];
    for (int k = 0; k < 3; ++k)
      if (!(fields >> values[k]))
        throw ParseError("samples: line " + std::to_string(line_no) + ": expected 3 numeric fields");
    std::string extra;
    if (fields >> extra) throw ParseError("samples: line " + std::to_string(line_no) + ": more than 3 fields");
    out.push_back({values[0], values[1], values[2]});
  }
  return out;
}

SampleSet read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample file " + path);
  return read_samples(in);
}

}  // namespace acompc
