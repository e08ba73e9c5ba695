#include "gapcert/cli.hpp"

#include "gapcert/dobrushin.hpp"
#include "gapcert/glauber.hpp"
#include "gapcert/report.hpp"
#include "gapcert/sampler.hpp"
#include "gapcert/transport.hpp"
#include "gapcert/wasserstein.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace gapcert {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownFields = {
    "command", "model",  "lambda0",   "caps",     "tolerances", "t_grid",
    "lambda_grid", "tilt_lambdas", "seed", "replicas", "out_dir", "K", "K0",
    "nvector", "blocks", "observable", "site_observable", "export_trajectory"};

std::vector<Real> as_real_list(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw InvalidInput("run config: field '" + field + "': expected a nonempty array");
  std::vector<Real> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidInput("run config: field '" + field + "': expected numbers");
    out.push_back(v.get<Real>());
  }
  if (!std::is_sorted(out.begin(), out.end()))
    throw InvalidInput("run config: field '" + field + "': grid must be sorted");
  return out;
}

void apply_overrides(RunConfig& config, const RunConfig::Overrides& overrides) {
  if (overrides.model) config.model_path = *overrides.model;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.lambda0) config.lambda0 = overrides.lambda0;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.replicas) config.replicas = *overrides.replicas;

  if (config.out_dir.empty()) {
    if (const char* env = std::getenv("GAPCERT_OUT_DIR"))
      config.out_dir = env;
    else
      config.out_dir = "gapcert_out";
  }
}

}  // namespace

RunConfig config_from_overrides(const std::string& command,
                                const RunConfig::Overrides& overrides) {
  RunConfig config;
  config.command = command;
  apply_overrides(config, overrides);
  if (config.model_path.empty() && command != "bounds")
    throw InvalidInput("no model given: pass --model or a config file");
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::string& command,
                          const RunConfig::Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();

  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.filename().string() + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidInput("run config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnownFields.count(key)) throw InvalidInput("run config: unknown field '" + key + "'");
  }

  RunConfig config;
  config.command = command;
  if (j.contains("command")) {
    const std::string file_cmd = j.at("command").get<std::string>();
    if (config.command.empty())
      config.command = file_cmd;
    else if (file_cmd != config.command)
      throw InvalidInput("run config: file command '" + file_cmd +
                         "' does not match the invoked subcommand");
  }
  if (config.command.empty()) throw InvalidInput("run config: no command given");

  if (j.contains("model")) {
    std::filesystem::path model = j.at("model").get<std::string>();
    if (model.is_relative()) model = path.parent_path() / model;
    config.model_path = model;
  }
  if (j.contains("lambda0")) config.lambda0 = j.at("lambda0").get<Real>();
  if (j.contains("caps")) {
    const json& caps = j.at("caps");
    if (caps.contains("joint")) config.joint_cap = caps.at("joint").get<std::size_t>();
    if (caps.contains("product")) config.product_cap = caps.at("product").get<std::size_t>();
  }
  if (j.contains("tolerances")) {
    const json& tol = j.at("tolerances");
    if (tol.contains("equality")) config.tol_eq = tol.at("equality").get<Real>();
    if (tol.contains("inequality")) config.tol_ineq = tol.at("inequality").get<Real>();
  }
  if (j.contains("t_grid")) config.t_grid = as_real_list(j.at("t_grid"), "t_grid");
  if (j.contains("lambda_grid"))
    config.lambda_grid = as_real_list(j.at("lambda_grid"), "lambda_grid");
  if (j.contains("tilt_lambdas"))
    config.tilt_lambdas = as_real_list(j.at("tilt_lambdas"), "tilt_lambdas");
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("replicas")) config.replicas = j.at("replicas").get<int>();
  if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("K")) config.K = j.at("K").get<Real>();
  if (j.contains("K0")) config.K0 = j.at("K0").get<Real>();
  if (j.contains("nvector")) {
    const json& nv = j.at("nvector");
    config.nvector = {nv.at("p").get<int>(), nv.at("gamma").get<Real>()};
  }
  if (j.contains("blocks")) {
    for (const auto& block : j.at("blocks")) {
      std::vector<int> sites;
      for (const auto& s : block) sites.push_back(s.get<int>());
      config.blocks.push_back(std::move(sites));
    }
  }
  if (j.contains("observable")) {
    const json& obs = j.at("observable");
    config.observable.type = obs.value("type", std::string("coordinate"));
    config.observable.site = obs.value("site", 0);
    if (obs.contains("values"))
      config.observable.values = as_real_list(obs.at("values"), "observable.values");
  }
  if (j.contains("site_observable"))
    config.site_observable = as_real_list(j.at("site_observable"), "site_observable");
  if (j.contains("export_trajectory"))
    config.export_trajectory = j.at("export_trajectory").get<bool>();

  apply_overrides(config, overrides);
  if (config.model_path.empty() && config.command != "bounds" && !config.nvector)
    throw InvalidInput("run config: no model given");
  return config;
}

namespace {

void write_header(ReportWriter& report, const RunConfig& config) {
  report.comment("gapcert " + config.command);
  std::string grids = "t_grid=";
  for (std::size_t k = 0; k < config.t_grid.size(); ++k)
    grids += (k ? "," : "") + format_real(config.t_grid[k]);
  grids += " lambda_grid=";
  for (std::size_t k = 0; k < config.lambda_grid.size(); ++k)
    grids += (k ? "," : "") + format_real(config.lambda_grid[k]);
  report.comment("defaults: joint_cap=" + std::to_string(config.joint_cap) +
                 " product_cap=" + std::to_string(config.product_cap) +
                 " tol_eq=" + format_real(config.tol_eq) +
                 " tol_ineq=" + format_real(config.tol_ineq) +
                 " seed=" + std::to_string(config.seed));
  report.comment("grids: " + grids);
  if (!config.model_path.empty()) report.comment("model: " + config.model_path.string());
}

void emit(const ReportWriter& report, const RunConfig& config, std::ostream& out) {
  std::filesystem::create_directories(config.out_dir);
  report.write_to(config.out_dir / (config.command + "_report.txt"));
  out << report.str();
}

void write_csv(const CsvWriter& csv, const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  csv.write_to(config.out_dir / name);
}

Vec observable_table(const RunConfig& config, const SpinModel& model) {
  const StateSpace& space = model.space();
  const auto n = static_cast<Index>(space.size());
  const auto& obs = config.observable;
  if (obs.type == "coordinate") {
    if (obs.site < 0 || obs.site >= model.num_sites())
      throw InvalidInput("observable: site out of range");
    Vec f(n);
    for (std::size_t a = 0; a < space.size(); ++a)
      f[static_cast<Index>(a)] = model.spin(obs.site).values[space.coord(a, obs.site)];
    return f;
  }
  if (obs.type == "table") {
    if (static_cast<Index>(obs.values.size()) != n)
      throw InvalidInput("observable: table must list one value per state");
    return Eigen::Map<const Vec>(obs.values.data(), n);
  }
  if (obs.type == "random") {
    Rng rng(config.seed ^ 0x6f6273ull);  // independent stream for the observable
    Vec f(n);
    for (Index a = 0; a < n; ++a) f[a] = 2.0 * rng.uniform01() - 1.0;
    return f;
  }
  throw InvalidInput("observable: unknown type '" + obs.type + "'");
}

Vec site_observable_values(const RunConfig& config, const SpinModel& model) {
  int max_radix = 0;
  for (int i = 0; i < model.num_sites(); ++i)
    max_radix = std::max(max_radix, model.space().radix(i));
  if (!config.site_observable.empty()) {
    if (static_cast<int>(config.site_observable.size()) < max_radix)
      throw InvalidInput("site_observable: needs one value per spin point");
    return Eigen::Map<const Vec>(config.site_observable.data(),
                                 static_cast<Index>(config.site_observable.size()));
  }
  for (int i = 0; i < model.num_sites(); ++i)
    if (model.space().radix(i) != model.space().radix(0))
      throw InvalidInput("site_observable: required when sites have different spin spaces");
  return model.spin(0).values;
}

void matrix_section(ReportWriter& report, const DobrushinMatrix& matrix) {
  report.section("dobrushin_matrix");
  report.kv("eq_2_3_metric", matrix.metric_tag);
  for (Index i = 0; i < matrix.C.rows(); ++i)
    report.kv("eq_2_3_row_" + std::to_string(i), Vec(matrix.C.row(i).transpose()));
}

void certificate_section(ReportWriter& report, const GapCertificate& cert) {
  report.section("certificate");
  report.kv("eq_2_4_r_sp", cert.r_sp);
  report.kv("eq_2_11_norm1", cert.norm1);
  report.kv("eq_2_11_norminf", cert.norminf);
  report.kv("eq_2_4_lambda1_lower", cert.lambda1_bound);
  report.kv("eq_2_4_valid", cert.valid);
  if (cert.lambda0) report.kv("eq_2_6_lambda0", *cert.lambda0);
  if (cert.lambda1_grad_bound) report.kv("eq_2_7_lambda1_grad_lower", *cert.lambda1_grad_bound);
}

void model_section(ReportWriter& report, const LoadedModel& model) {
  report.section("model");
  report.kv("kind", to_string(model.kind));
  if (model.kind == ModelKind::GaussianPair) {
    report.kv("rho", model.gaussian_rho);
  } else if (model.spin) {
    report.kv("sites", static_cast<Real>(model.spin->num_sites()));
    report.kv("states", static_cast<Real>(model.spin->space().size()));
  }
}

std::pair<DobrushinMatrix, GapCertificate> certify(const LoadedModel& model,
                                                   std::optional<Real> lambda0) {
  if (model.kind == ModelKind::GaussianPair) {
    const DobrushinMatrix matrix = interdependence_matrix(*model.gaussian);
    return {matrix, gap_certificate(*model.gaussian, lambda0)};
  }
  const DobrushinMatrix matrix = interdependence_matrix(model.require_spin());
  return {matrix, gap_certificate(matrix, lambda0)};
}

}  // namespace

int cmd_certify(const RunConfig& config, std::ostream& out) {
  const LoadedModel model = load_model(config.model_path);
  const auto [matrix, cert] = certify(model, config.lambda0);

  ReportWriter report;
  write_header(report, config);
  model_section(report, model);
  matrix_section(report, matrix);
  certificate_section(report, cert);

  CsvWriter csv({"i", "j", "c_ij"});
  for (Index i = 0; i < matrix.C.rows(); ++i)
    for (Index j = 0; j < matrix.C.cols(); ++j)
      csv.row({static_cast<Real>(i), static_cast<Real>(j), matrix.C(i, j)});
  write_csv(csv, config, "certify_matrix.csv");
  emit(report, config, out);
  return cert.valid ? kExitPass : kExitViolation;
}

int cmd_spectrum(const RunConfig& config, std::ostream& out) {
  const LoadedModel model = load_model(config.model_path);

  Real exact = 0.0;
  const auto [matrix, cert] = certify(model, config.lambda0);
  ReportWriter report;
  write_header(report, config);
  model_section(report, model);

  if (model.kind == ModelKind::GaussianPair) {
    // Restriction of the generator to linear functions; exact on that span.
    Eigen::SelfAdjointEigenSolver<Mat> solver(model.gaussian->linear_restriction());
    exact = -solver.eigenvalues().maxCoeff();
    report.section("spectrum");
    report.kv("restriction", std::string("degree-1 span"));
  } else {
    const GeneratorMatrix gen = build_generator(model.require_spin(), config.joint_cap);
    exact = exact_spectral_gap(gen);
    report.section("spectrum");
    report.kv("states", static_cast<Real>(gen.L.rows()));
  }
  const Real margin = exact - cert.lambda1_bound;
  report.kv("lambda1_exact", exact);
  report.kv("eq_2_4_lambda1_lower", cert.lambda1_bound);
  report.kv("eq_2_4_r_sp", cert.r_sp);
  report.kv("margin", margin);
  report.kv("tol_inequality", config.tol_ineq);

  CsvWriter csv({"lambda1_exact", "lambda1_bound", "margin"});
  csv.row({exact, cert.lambda1_bound, margin});
  write_csv(csv, config, "spectrum.csv");
  emit(report, config, out);
  return margin >= -config.tol_ineq ? kExitPass : kExitViolation;
}

int cmd_contract(const RunConfig& config, std::ostream& out) {
  const LoadedModel model = load_model(config.model_path);
  const SpinModel& spin = model.require_spin();
  const DobrushinMatrix matrix = interdependence_matrix(spin);
  const Vec f = observable_table(config, spin);
  const ContractionReport result =
      check_contraction(spin, matrix, f, config.t_grid, config.joint_cap);

  ReportWriter report;
  write_header(report, config);
  model_section(report, model);
  matrix_section(report, matrix);
  report.section("contraction");
  report.kv("eq_2_10_worst_margin", result.worst_margin);
  report.kv("eq_2_10_pass", result.pass(config.tol_ineq));
  for (const auto& agg : result.aggregates) {
    const std::string suffix = "_t_" + format_real(agg.t);
    report.kv("eq_2_11_sum_actual" + suffix, agg.sum_actual);
    report.kv("eq_2_11_sum_bound" + suffix, agg.sum_bound);
    report.kv("eq_2_11_max_actual" + suffix, agg.max_actual);
    report.kv("eq_2_11_max_bound" + suffix, agg.max_bound);
  }

  CsvWriter csv({"t", "site", "delta_actual", "delta_bound", "margin"});
  for (const auto& row : result.rows)
    csv.row({row.t, static_cast<Real>(row.site), row.delta_actual, row.delta_bound, row.margin});
  write_csv(csv, config, "decay.csv");
  emit(report, config, out);
  return result.pass(config.tol_ineq) ? kExitPass : kExitViolation;
}

int cmd_ips(const RunConfig& config, std::ostream& out) {
  const LoadedModel model = load_model(config.model_path);
  const SpinModel& spin = model.require_spin();

  std::vector<std::vector<int>> blocks = config.blocks;
  if (blocks.empty())
    for (int i = 0; i < spin.num_sites(); ++i) blocks.push_back({i});

  const JumpRateFamily family = heat_bath_family(spin, blocks, config.joint_cap);
  const IPSConstants constants = ips_constants(family);
  const Vec f = observable_table(config, spin);

  const ContractionReport exact_check =
      check_ips_contraction(family, constants.c_exact, constants.eta, f, config.t_grid,
                            config.joint_cap);
  std::optional<ContractionReport> tv_check;
  if (!constants.c_tv.hasNaN())
    tv_check = check_ips_contraction(family, constants.c_tv, constants.eta, f, config.t_grid,
                                     config.joint_cap);

  ReportWriter report;
  write_header(report, config);
  model_section(report, model);
  report.section("jump_family");
  report.comment("rate-variation suprema range over the declared window only");
  report.kv("members", static_cast<Real>(family.members.size()));
  report.kv("eq_3_4_eta", constants.eta);
  report.kv("mass_uniform", constants.mass_uniform);
  if (!constants.mass_uniform)
    report.kv("warning", std::string("total jump mass varies with the configuration; "
                                     "optimal constants may be infinite"));
  for (Index i = 0; i < constants.c_exact.rows(); ++i)
    report.kv("eq_3_3_c_exact_row_" + std::to_string(i),
              Vec(constants.c_exact.row(i).transpose()));
  if (!constants.c_tv.hasNaN())
    for (Index i = 0; i < constants.c_tv.rows(); ++i)
      report.kv("eq_3_2_c_tv_row_" + std::to_string(i), Vec(constants.c_tv.row(i).transpose()));

  report.section("contraction");
  report.kv("eq_3_5_worst_margin_exact", exact_check.worst_margin);
  report.kv("eq_3_5_pass_exact", exact_check.pass(config.tol_ineq));
  if (tv_check) {
    report.kv("eq_3_5_worst_margin_tv", tv_check->worst_margin);
    report.kv("eq_3_5_pass_tv", tv_check->pass(config.tol_ineq));
  }

  bool pass = exact_check.pass(config.tol_ineq) &&
              (!tv_check || tv_check->pass(config.tol_ineq));

  if (family.space.size() <= config.product_cap) {
    const InvariantDecayReport decay =
        invariant_w1_decay(family, constants.c_exact, constants.eta, 0, config.t_grid,
                           config.product_cap);
    report.section("invariant_decay");
    report.kv("unique_invariant", decay.unique);
    report.kv("multiplicity", static_cast<Real>(decay.multiplicity));
    if (decay.unique) {
      report.kv("eq_3_9_worst_margin", decay.worst_margin);
      report.kv("eq_3_9_pass", decay.pass(config.tol_ineq));
      pass = pass && decay.pass(config.tol_ineq);
    }
  }

  CsvWriter csv({"t", "site", "delta_actual", "delta_bound", "margin"});
  for (const auto& row : exact_check.rows)
    csv.row({row.t, static_cast<Real>(row.site), row.delta_actual, row.delta_bound, row.margin});
  write_csv(csv, config, "ips_decay.csv");
  emit(report, config, out);
  return pass ? kExitPass : kExitViolation;
}

int cmd_transport(const RunConfig& config, std::ostream& out) {
  const LoadedModel model = load_model(config.model_path);
  const SpinModel& spin = model.require_spin();
  const DobrushinMatrix matrix = interdependence_matrix(spin);
  const Real norm1 = matrix_norms(matrix.C).first;

  ReportWriter report;
  write_header(report, config);
  model_section(report, model);
  matrix_section(report, matrix);

  if (!(norm1 < 1.0)) {
    report.section("transport");
    report.kv("skipped", std::string("|C|_1 >= 1: transport estimates need a contracting matrix"));
    emit(report, config, out);
    return kExitPass;
  }

  const Vec mu = spin.joint_table(config.joint_cap);
  const Vec F = observable_table(config, spin);
  const std::vector<Vec> nus = tilted_family(mu, F, config.tilt_lambdas);

  Real worst = std::numeric_limits<Real>::infinity();
  report.section("apriori");
  for (std::size_t k = 0; k < nus.size(); ++k) {
    const AprioriResult res = apriori_check(spin, matrix, nus[k], F, config.product_cap);
    const std::string suffix = "_tilt_" + format_real(config.tilt_lambdas[k]);
    if (res.mean_difference) {
      report.kv("eq_4_1_margin" + suffix, res.mean_difference->margin);
      worst = std::min(worst, res.mean_difference->margin);
    }
    if (res.product_w1) {
      report.kv("eq_4_2_margin" + suffix, res.product_w1->margin);
      worst = std::min(worst, res.product_w1->margin);
    }
  }

  report.section("t1");
  const std::vector<TransportCheck> t1 = t1_check(spin, matrix, nus, config.K, config.product_cap);
  for (std::size_t k = 0; k < t1.size(); ++k) {
    report.kv("eq_4_5_margin_tilt_" + format_real(config.tilt_lambdas[k]),
              t1[k].vacuous ? std::numeric_limits<Real>::infinity() : t1[k].margin);
    if (!t1[k].vacuous) worst = std::min(worst, t1[k].margin);
  }
  if (!t1.empty()) report.kv("K", t1.front().constants.at("K"));

  const std::vector<TransportCheck> mgf =
      hoeffding_check(spin, matrix, F, config.lambda_grid, config.K);
  CsvWriter csv({"lambda", "mgf", "bound", "margin"});
  for (const auto& check : mgf) {
    csv.row({check.constants.at("lambda"), check.lhs, check.rhs, check.margin});
    worst = std::min(worst, check.margin);
  }
  write_csv(csv, config, "mgf.csv");

  const Vec site_f = site_observable_values(config, spin);
  const std::vector<TransportCheck> clt =
      hoeffding_clt_check(spin, matrix, site_f, config.lambda_grid);
  CsvWriter clt_csv({"lambda", "mgf", "bound", "margin"});
  for (const auto& check : clt) {
    clt_csv.row({check.constants.at("lambda"), check.lhs, check.rhs, check.margin});
    worst = std::min(worst, check.margin);
  }
  write_csv(clt_csv, config, "mgf_clt.csv");

  report.section("hoeffding");
  report.kv("eq_4_6_worst_margin", worst);
  report.kv("eq_4_6_pass", worst >= -config.tol_ineq);
  emit(report, config, out);
  return worst >= -config.tol_ineq ? kExitPass : kExitViolation;
}

int cmd_bounds(const RunConfig& config, std::ostream& out) {
  ReportWriter report;
  write_header(report, config);

  BoundReport bounds;
  bool certifies = false;

  if (config.nvector) {
    bounds = nvector_bounds(config.nvector->first, config.nvector->second);
    const BoundValue* cond = bounds.find("eq_5_7_gamma_max");
    certifies = cond && cond->valid.value_or(false);
  } else {
    const LoadedModel model = load_model(config.model_path);
    model_section(report, model);
    switch (model.kind) {
      case ModelKind::Ising: {
        const Real r = ising_r_bound(model.ising_couplings);
        bounds.family = "ising";
        bounds.values.push_back({"ex_5_1_r", r, r < 1.0, "row bound on the interdependence matrix"});
        certifies = r < 1.0;
        break;
      }
      case ModelKind::PottsAF: {
        bounds = potts_bound(model.potts_colors, model.potts_lattice_dim);
        const BoundValue* norm = bounds.find("ex_5_2_norm_bound");
        certifies = norm && norm->valid.value_or(false);
        break;
      }
      case ModelKind::Phi4Grid: {
        std::vector<std::pair<long, Real>> offsets(model.phi4_offsets.begin(),
                                                   model.phi4_offsets.end());
        bounds = phi4_bounds(model.phi4_a, model.phi4_b, offsets, *model.phi4_grid, config.K0);
        const BoundValue* cond = bounds.find("eq_5_18_gamma");
        certifies = cond && cond->valid.value_or(false);
        break;
      }
      case ModelKind::GaussianPair: {
        bounds.family = "gaussian_pair";
        const Real r = std::abs(model.gaussian_rho);
        bounds.values.push_back({"eq_2_4_r_sp", r, r < 1.0, "closed-form spectral radius"});
        bounds.values.push_back({"eq_2_4_lambda1_lower", 1.0 - r, r < 1.0, ""});
        certifies = r < 1.0;
        break;
      }
      case ModelKind::FreeProduct: {
        bounds.family = "free_product";
        bounds.values.push_back({"eq_2_4_r_sp", 0.0, true, "no interaction"});
        bounds.values.push_back({"eq_2_4_lambda1_lower", 1.0, true, ""});
        certifies = true;
        break;
      }
    }
  }

  report.section("bounds");
  report.kv("family", bounds.family);
  for (const auto& [name, value] : bounds.params) report.kv("param_" + name, value);
  for (const BoundValue& v : bounds.values) {
    report.kv(v.tag, v.value);
    if (v.valid) report.kv(v.tag + "_valid", *v.valid);
    if (!v.note.empty()) report.kv(v.tag + "_note", v.note);
  }
  report.kv("certifies", certifies);

  CsvWriter csv({"tag", "value", "valid"});
  for (const BoundValue& v : bounds.values)
    csv.raw_row({v.tag, format_real(v.value),
                 v.valid ? (*v.valid ? "true" : "false") : ""});
  write_csv(csv, config, "bounds.csv");
  emit(report, config, out);
  return certifies ? kExitPass : kExitViolation;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const LoadedModel model = load_model(config.model_path);
  const SpinModel& spin = model.require_spin();
  const Vec f = observable_table(config, spin);

  const AutocorrReport result = autocorrelation_decay(spin, f, config.t_grid, config.replicas,
                                                      config.seed, {}, config.joint_cap);

  ReportWriter report;
  write_header(report, config);
  model_section(report, model);
  report.section("autocorrelation");
  report.kv("replicas", static_cast<Real>(result.replicas));
  report.kv("variance", result.variance);
  report.kv("eq_2_4_decay_rate", result.rate);
  report.kv("envelope_pass", result.pass());
  if (result.statistical_power_warning)
    report.kv("warning", std::string("confidence intervals are wide; increase replicas"));

  CsvWriter csv({"t", "autocov", "ci_half", "envelope"});
  for (const auto& row : result.rows) csv.row({row.t, row.autocov, row.ci_half, row.envelope});
  write_csv(csv, config, "estimates.csv");

  if (config.export_trajectory) {
    const SeedSpec seeds{config.seed};
    const Vec mu = spin.joint_table(config.joint_cap);
    const std::size_t x0 = exact_sample(mu, 1, seeds.replica_stream(0), config.joint_cap)[0];
    const Trajectory traj = gillespie(spin, x0, config.t_grid.back(), seeds.replica_stream(1));
    CsvWriter tcsv({"time", "site", "new_value"});
    for (const auto& event : traj.events)
      tcsv.row({event.time, static_cast<Real>(event.site), static_cast<Real>(event.new_value)});
    write_csv(tcsv, config, "trajectory.csv");
  }
  emit(report, config, out);
  return result.pass() ? kExitPass : kExitViolation;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == "certify") return cmd_certify(config, out);
    if (config.command == "spectrum") return cmd_spectrum(config, out);
    if (config.command == "contract") return cmd_contract(config, out);
    if (config.command == "ips") return cmd_ips(config, out);
    if (config.command == "transport") return cmd_transport(config, out);
    if (config.command == "bounds") return cmd_bounds(config, out);
    if (config.command == "simulate") return cmd_simulate(config, out);
    err << "unknown command: " << config.command << "\n";
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const SizeLimit& e) {
    err << "size limit: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const UnsupportedModel& e) {
    err << "unsupported model: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace gapcert
