#pragma once

#include "gapcert/models.hpp"
#include "gapcert/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gapcert {

/// A model parsed from a definition file: the enumerable window (or the
/// analytic Gaussian pair) plus the family parameters the closed-form bound
/// calculators need.
struct LoadedModel {
  ModelKind kind = ModelKind::FreeProduct;
  std::optional<SpinModel> spin;
  std::optional<GaussianPair> gaussian;

  // Family parameters retained for the bound calculators.
  std::vector<SubsetCoupling> ising_couplings;
  int potts_colors = 0;
  Real potts_J = 0.0;
  int potts_lattice_dim = 1;
  Real phi4_a = 0.0, phi4_b = 0.0;
  std::map<long, Real> phi4_offsets;
  std::optional<Metric> phi4_grid;
  Real gaussian_rho = 0.0;

  bool enumerable() const { return spin.has_value(); }
  const SpinModel& require_spin() const {
    if (!spin) throw UnsupportedModel("this command needs an enumerable model");
    return *spin;
  }
};

/// Parses a JSON model definition. Parse errors cite line/column; field
/// errors cite the offending field path.
LoadedModel load_model(const std::filesystem::path& path);
LoadedModel parse_model(const std::string& text, const std::string& origin);

/// Replaces every site metric by the line metric on the site's spin values
/// (values must be distinct per site).
SpinModel with_line_metrics(const SpinModel& model);

}  // namespace gapcert
