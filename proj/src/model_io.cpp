#include "gapcert/model_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace gapcert {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& origin, const std::string& field,
                              const std::string& what) {
  throw InvalidInput(origin + ": field '" + field + "': " + what);
}

const json& require(const json& j, const std::string& origin, const std::string& field) {
  auto it = j.find(field);
  if (it == j.end()) field_error(origin, field, "missing");
  return *it;
}

Real as_real(const json& j, const std::string& origin, const std::string& field) {
  if (!j.is_number()) field_error(origin, field, "expected a number");
  return j.get<Real>();
}

long as_long(const json& j, const std::string& origin, const std::string& field) {
  if (!j.is_number_integer()) field_error(origin, field, "expected an integer");
  return j.get<long>();
}

std::vector<long> as_site_list(const json& j, const std::string& origin,
                               const std::string& field) {
  if (!j.is_array() || j.empty()) field_error(origin, field, "expected a nonempty array");
  std::vector<long> sites;
  for (std::size_t k = 0; k < j.size(); ++k)
    sites.push_back(as_long(j[k], origin, field + "[" + std::to_string(k) + "]"));
  return sites;
}

Vec as_vec(const json& j, const std::string& origin, const std::string& field) {
  if (!j.is_array() || j.empty()) field_error(origin, field, "expected a nonempty array");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v[static_cast<Index>(k)] = as_real(j[k], origin, field + "[" + std::to_string(k) + "]");
  return v;
}

std::string metric_choice(const json& j, const std::string& origin) {
  if (!j.contains("metric")) return "default";
  const json& m = j.at("metric");
  if (!m.is_string()) field_error(origin, "metric", "expected a string");
  const std::string choice = m.get<std::string>();
  if (choice != "default" && choice != "trivial" && choice != "embedded")
    field_error(origin, "metric", "expected one of default|trivial|embedded");
  return choice;
}

LoadedModel parse_ising(const json& j, const std::string& origin) {
  LoadedModel out;
  out.kind = ModelKind::Ising;
  const std::vector<long> sites = as_site_list(require(j, origin, "sites"), origin, "sites");

  const json& cpls = require(j, origin, "couplings");
  if (!cpls.is_array()) field_error(origin, "couplings", "expected an array");
  for (std::size_t k = 0; k < cpls.size(); ++k) {
    const std::string path = "couplings[" + std::to_string(k) + "]";
    const json& c = cpls[k];
    if (!c.is_object()) field_error(origin, path, "expected an object");
    SubsetCoupling cpl;
    cpl.sites = as_site_list(require(c, origin, path + ".sites"), origin, path + ".sites");
    cpl.J = as_real(require(c, origin, path + ".J"), origin, path + ".J");
    out.ising_couplings.push_back(std::move(cpl));
  }

  std::map<long, Real> boundary;
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    if (!b.is_array()) field_error(origin, "boundary", "expected an array");
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::string path = "boundary[" + std::to_string(k) + "]";
      boundary[as_long(require(b[k], origin, path + ".site"), origin, path + ".site")] =
          as_real(require(b[k], origin, path + ".value"), origin, path + ".value");
    }
  }

  out.spin = make_ising(sites, out.ising_couplings, boundary);
  if (metric_choice(j, origin) == "embedded") out.spin = with_line_metrics(*out.spin);
  return out;
}

LoadedModel parse_potts(const json& j, const std::string& origin) {
  LoadedModel out;
  out.kind = ModelKind::PottsAF;
  const std::vector<long> sites = as_site_list(require(j, origin, "sites"), origin, "sites");
  out.potts_colors = static_cast<int>(as_long(require(j, origin, "colors"), origin, "colors"));
  out.potts_J = as_real(require(j, origin, "J"), origin, "J");
  if (j.contains("lattice_dim"))
    out.potts_lattice_dim =
        static_cast<int>(as_long(j.at("lattice_dim"), origin, "lattice_dim"));

  const json& edges = require(j, origin, "edges");
  if (!edges.is_array()) field_error(origin, "edges", "expected an array");
  std::vector<std::pair<long, long>> edge_list;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string path = "edges[" + std::to_string(k) + "]";
    if (!edges[k].is_array() || edges[k].size() != 2)
      field_error(origin, path, "expected a pair of sites");
    edge_list.emplace_back(as_long(edges[k][0], origin, path + "[0]"),
                           as_long(edges[k][1], origin, path + "[1]"));
  }

  std::map<long, int> boundary;
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    if (!b.is_array()) field_error(origin, "boundary", "expected an array");
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::string path = "boundary[" + std::to_string(k) + "]";
      boundary[as_long(require(b[k], origin, path + ".site"), origin, path + ".site")] =
          static_cast<int>(
              as_long(require(b[k], origin, path + ".color"), origin, path + ".color"));
    }
  }
  if (metric_choice(j, origin) == "embedded")
    field_error(origin, "metric", "potts colors have no embedding");

  out.spin = make_potts(sites, out.potts_colors, edge_list, out.potts_J, boundary);
  return out;
}

LoadedModel parse_gaussian(const json& j, const std::string& origin) {
  LoadedModel out;
  out.kind = ModelKind::GaussianPair;
  out.gaussian_rho = as_real(require(j, origin, "rho"), origin, "rho");
  const std::string metric = metric_choice(j, origin);
  if (metric == "trivial")
    throw UnsupportedModel(origin +
                           ": trivial metric is unsupported for the gaussian pair "
                           "(unbounded state space); only the euclidean metric is computed");
  out.gaussian = GaussianPair(out.gaussian_rho);
  return out;
}

LoadedModel parse_phi4(const json& j, const std::string& origin) {
  LoadedModel out;
  out.kind = ModelKind::Phi4Grid;
  const std::vector<long> sites = as_site_list(require(j, origin, "sites"), origin, "sites");
  out.phi4_a = as_real(require(j, origin, "a"), origin, "a");
  out.phi4_b = as_real(require(j, origin, "b"), origin, "b");
  const int points =
      static_cast<int>(as_long(require(j, origin, "grid_points"), origin, "grid_points"));
  std::optional<Real> halfwidth;
  if (j.contains("grid_halfwidth"))
    halfwidth = as_real(j.at("grid_halfwidth"), origin, "grid_halfwidth");

  if (j.contains("couplings")) {
    const json& cpls = j.at("couplings");
    if (!cpls.is_array()) field_error(origin, "couplings", "expected an array");
    for (std::size_t k = 0; k < cpls.size(); ++k) {
      const std::string path = "couplings[" + std::to_string(k) + "]";
      const long offset =
          as_long(require(cpls[k], origin, path + ".offset"), origin, path + ".offset");
      const Real J = as_real(require(cpls[k], origin, path + ".J"), origin, path + ".J");
      if (offset <= 0) field_error(origin, path + ".offset", "must be a positive offset");
      out.phi4_offsets[offset] += J;
    }
  }

  std::map<long, Real> boundary;
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    if (!b.is_array()) field_error(origin, "boundary", "expected an array");
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::string path = "boundary[" + std::to_string(k) + "]";
      boundary[as_long(require(b[k], origin, path + ".site"), origin, path + ".site")] =
          as_real(require(b[k], origin, path + ".value"), origin, path + ".value");
    }
  }

  out.phi4_grid = quartic_grid(out.phi4_a, points, halfwidth);
  out.spin = make_phi4(sites, out.phi4_a, out.phi4_b, out.phi4_offsets, *out.phi4_grid, boundary);
  return out;
}

LoadedModel parse_free(const json& j, const std::string& origin) {
  LoadedModel out;
  out.kind = ModelKind::FreeProduct;
  const json& marg = require(j, origin, "marginals");
  if (!marg.is_array() || marg.empty())
    field_error(origin, "marginals", "expected a nonempty array");

  std::vector<Vec> weights;
  std::vector<std::optional<Vec>> values;
  for (std::size_t k = 0; k < marg.size(); ++k) {
    const std::string path = "marginals[" + std::to_string(k) + "]";
    if (!marg[k].is_object()) field_error(origin, path, "expected an object");
    weights.push_back(as_vec(require(marg[k], origin, path + ".weights"), origin,
                             path + ".weights"));
    if (marg[k].contains("values"))
      values.push_back(as_vec(marg[k].at("values"), origin, path + ".values"));
    else
      values.push_back(std::nullopt);
  }
  out.spin = make_free_product(weights, values);
  if (metric_choice(j, origin) == "embedded") out.spin = with_line_metrics(*out.spin);
  return out;
}

}  // namespace

LoadedModel parse_model(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(origin + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidInput(origin + ": top level must be an object");

  const json& kind = require(j, origin, "model");
  if (!kind.is_string()) field_error(origin, "model", "expected a string");
  const std::string name = kind.get<std::string>();
  if (name == "ising") return parse_ising(j, origin);
  if (name == "potts") return parse_potts(j, origin);
  if (name == "gaussian_pair") return parse_gaussian(j, origin);
  if (name == "phi4") return parse_phi4(j, origin);
  if (name == "free_product") return parse_free(j, origin);
  field_error(origin, "model",
              "unknown model '" + name + "' (expected ising|potts|gaussian_pair|phi4|free_product)");
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open model file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), path.filename().string());
}

SpinModel with_line_metrics(const SpinModel& model) {
  std::vector<SpinSpace> spins;
  for (int i = 0; i < model.num_sites(); ++i) {
    const Vec& values = model.spin(i).values;
    std::set<Real> distinct(values.data(), values.data() + values.size());
    if (static_cast<Index>(distinct.size()) != values.size())
      throw InvalidInput("embedded metric needs distinct spin values per site");
    spins.push_back(SpinSpace{values, Metric::from_line_embedding(values)});
  }
  return SpinModel(model.kind(), model.site_ids(), std::move(spins), model.terms());
}

}  // namespace gapcert
