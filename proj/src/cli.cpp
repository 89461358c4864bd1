#include "rocfit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"

#include "rocfit/error.hpp"
#include "rocfit/inference.hpp"
#include "rocfit/io.hpp"
#include "rocfit/svg.hpp"

namespace rocfit::cli {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  const std::size_t expected = command == Command::compare ? 2 : 1;
  if (command == Command::plot ? inputs.empty() : inputs.size() != expected) {
    throw ValidationError("wrong number of input files (expected " + std::to_string(expected) + ")");
  }
  for (const auto& path : inputs) {
    if (!fs::exists(path)) throw ValidationError("input file '" + path + "' does not exist");
  }
  if (family == Family::beta_mixture) throw ValidationError("beta mixtures cannot be fitted");
  if (command == Command::gof && M < 19) throw ValidationError("--M must be at least 19");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("--level must lie in (0,1)");
  if (draws < 2) throw ValidationError("--draws must be at least 2");
  if (restarts < 1) throw ValidationError("--restarts must be at least 1");
}

std::string RunConfig::output_dir() const {
  if (!out_dir.empty()) return out_dir;
  if (const char* env = std::getenv("ROCFIT_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

namespace {

FitConfig fit_config(const RunConfig& rc) {
  FitConfig fc;
  fc.family = rc.family;
  fc.constraint = rc.constraint;
  fc.optimizer.restarts = rc.restarts;
  return fc;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string path_in(const RunConfig& rc, const std::string& name) { return (fs::path(rc.output_dir()) / name).string(); }

nlohmann::json sample_json(const std::string& path, const LabeledSample& s) {
  return {{"path", path}, {"n", s.size()}, {"n0", s.n0()}, {"n1", s.n1()}};
}

struct FittedInput {
  LabeledSample sample;
  EmpiricalRoc curve;
  FitResult fit;
};

FittedInput fit_input(const RunConfig& rc, const std::string& path, std::ostream& out) {
  LabeledSample sample = io::parse_dataset(path);
  sample.require_both_classes();
  out << path << ": " << sample.size() << " observations (n0 = " << sample.n0() << ", n1 = " << sample.n1() << ")\n";
  EmpiricalRoc curve = empirical_roc(sample);
  FitResult fit = fit_mde(curve, fit_config(rc));
  return {std::move(sample), std::move(curve), std::move(fit)};
}

void print_fit(const FitResult& fit, std::ostream& out) {
  out << family_name(fit.family) << " (" << constraint_name(fit.constraint) << "): theta =";
  for (double t : fit.theta) out << " " << t;
  out << ", fit = " << fit.distance << (fit.converged ? "" : " [not converged]") << "\n";
}

svg::Series empirical_series(const EmpiricalRoc& curve) {
  svg::Series s;
  for (std::size_t i = 0; i < curve.size(); ++i) s.points.emplace_back(curve.far(i), curve.hr(i));
  s.color = "black";
  s.label = "empirical";
  return s;
}

svg::Series model_series(const EmpiricalRoc& curve, const RocModel& model, const std::string& label,
                         const std::string& color, bool dashed) {
  svg::Series s;
  for (double p : io::curve_grid(curve)) s.points.emplace_back(p, roc_eval(model, p));
  s.color = color;
  s.dashed = dashed;
  s.label = label;
  return s;
}

std::string model_label(const nlohmann::json& result) {
  return result.at("family").get<std::string>() + " " + result.at("constraint").get<std::string>();
}

int cmd_fit(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const FittedInput in = fit_input(rc, rc.inputs[0], out);
  print_fit(in.fit, out);
  const RocModel model = in.fit.model();

  nlohmann::json j;
  j["command"] = "fit";
  j["input"] = sample_json(rc.inputs[0], in.sample);
  j["empirical_auc"] = empirical_auc(in.curve);
  j["result"] = to_json(in.fit);
  j["model"] = to_json(model);
  j["empirical"] = io::to_json(in.curve);
  try {
    const CovarianceEstimate cov = asymptotic_covariance(in.fit, in.sample.n0(), in.sample.n1());
    const AucInference auc = auc_inference(model, cov);
    j["covariance"] = to_json(cov);
    j["auc_inference"] = {{"auc", auc.auc}, {"standard_error", auc.standard_error}, {"gradient", auc.gradient}};
    for (const auto& w : cov.warnings) err << "warning: " << w << "\n";
    out << "AUC = " << auc.auc << " (se " << auc.standard_error << ")\n";
  } catch (const ValidationError& e) {
    j["covariance"] = nullptr;
    j["covariance_note"] = e.what();
    err << "note: " << e.what() << "\n";
  }
  io::write_file(path_in(rc, "fit.json"), dump(j));
  io::write_file(path_in(rc, "curve.csv"), io::curve_csv(in.curve, model));
  out << "wrote " << path_in(rc, "fit.json") << " and " << path_in(rc, "curve.csv") << "\n";
  return 0;
}

int cmd_gof(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  LabeledSample sample = io::parse_dataset(rc.inputs[0]);
  sample.require_both_classes();
  const TestResult test = gof_test(sample, fit_config(rc), rc.M, rc.seed);
  print_fit(*test.fit, out);
  out << "goodness of fit: d_data = " << test.statistic << ", p = " << test.p_value << " (M = " << rc.M
      << ", seed = " << rc.seed << ")\n";
  for (const auto& w : test.warnings) err << "warning: " << w << "\n";

  nlohmann::json j;
  j["command"] = "gof";
  j["input"] = sample_json(rc.inputs[0], sample);
  j["test"] = to_json(test);
  io::write_file(path_in(rc, "gof.json"), dump(j));
  if (rc.replicates_csv) {
    std::string csv = "replicate,distance\n";
    for (std::size_t m = 0; m < test.replicates.size(); ++m) {
      csv += std::to_string(m + 1) + "," + io::format_double(test.replicates[m]) + "\n";
    }
    io::write_file(path_in(rc, "gof_replicates.csv"), csv);
  }
  out << "wrote " << path_in(rc, "gof.json") << "\n";
  return 0;
}

int cmd_compare(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const FittedInput a = fit_input(rc, rc.inputs[0], out);
  print_fit(a.fit, out);
  const FittedInput b = fit_input(rc, rc.inputs[1], out);
  print_fit(b.fit, out);
  const CovarianceEstimate cov_a = asymptotic_covariance(a.fit, a.sample.n0(), a.sample.n1());
  const CovarianceEstimate cov_b = asymptotic_covariance(b.fit, b.sample.n0(), b.sample.n1());
  const TestResult curve = curve_equality_test(a.fit, cov_a, b.fit, cov_b);
  const TestResult auc = auc_equality_test(a.fit, cov_a, b.fit, cov_b);
  for (const auto& w : curve.warnings) err << "warning: " << w << "\n";
  out << "curve equality: chi2 = " << curve.statistic << " (dof " << curve.dof << "), p = " << curve.p_value << "\n";
  out << "AUC equality: z = " << auc.statistic << ", p = " << auc.p_value << "\n";

  nlohmann::json j;
  j["command"] = "compare";
  j["inputs"] = {sample_json(rc.inputs[0], a.sample), sample_json(rc.inputs[1], b.sample)};
  j["fits"] = {to_json(a.fit), to_json(b.fit)};
  j["covariances"] = {to_json(cov_a), to_json(cov_b)};
  j["curve_equality"] = to_json(curve);
  j["auc_equality"] = to_json(auc);
  io::write_file(path_in(rc, "compare.json"), dump(j));
  out << "wrote " << path_in(rc, "compare.json") << "\n";
  return 0;
}

nlohmann::json band_json(const ConfidenceBand& band) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : band.points) pts.push_back({p.p, p.fitted, p.lower, p.upper});
  return {{"level", band.level}, {"draws", band.draws}, {"rejected", band.rejected}, {"seed", band.seed},
          {"points", pts}};
}

svg::Band band_shape(const nlohmann::json& band) {
  svg::Band b;
  for (const auto& p : band.at("points")) {
    b.x.push_back(p.at(0).get<double>());
    b.lower.push_back(p.at(2).get<double>());
    b.upper.push_back(p.at(3).get<double>());
  }
  b.label = "pointwise " + io::format_double(band.at("level").get<double>()) + " band";
  return b;
}

int cmd_band(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const FittedInput in = fit_input(rc, rc.inputs[0], out);
  print_fit(in.fit, out);
  const RocModel model = in.fit.model();
  const CovarianceEstimate cov = asymptotic_covariance(in.fit, in.sample.n0(), in.sample.n1());
  for (const auto& w : cov.warnings) err << "warning: " << w << "\n";
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(i / 200.0);
  const ConfidenceBand band = confidence_band(model, cov, grid, rc.level, rc.draws, rc.seed);
  if (band.rejected > 0) err << "note: " << band.rejected << " draws outside the parameter domain were discarded\n";

  std::string csv = "p,fitted,lower,upper\n";
  for (const auto& p : band.points) {
    csv += io::format_double(p.p) + "," + io::format_double(p.fitted) + "," + io::format_double(p.lower) + "," +
           io::format_double(p.upper) + "\n";
  }
  nlohmann::json j;
  j["command"] = "band";
  j["input"] = sample_json(rc.inputs[0], in.sample);
  j["result"] = to_json(in.fit);
  j["model"] = to_json(model);
  j["empirical"] = io::to_json(in.curve);
  j["covariance"] = to_json(cov);
  j["band"] = band_json(band);

  svg::Figure fig;
  fig.title = "ROC curve with pointwise band";
  fig.bands.push_back(band_shape(j["band"]));
  fig.series.push_back(empirical_series(in.curve));
  fig.series.push_back(model_series(in.curve, model, model_label(j["result"]), "firebrick", false));
  io::write_file(path_in(rc, "band.json"), dump(j));
  io::write_file(path_in(rc, "band.csv"), csv);
  io::write_file(path_in(rc, "band.svg"), svg::render(fig));
  out << "wrote " << path_in(rc, "band.json") << ", band.csv, band.svg\n";
  return 0;
}

std::string rational_string(const Rational& r) {
  return std::to_string(r.numerator()) + (r.denominator() == 1 ? "" : "/" + std::to_string(r.denominator()));
}

int cmd_pav(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const LabeledSample sample = io::parse_dataset(rc.inputs[0]);
  const PavResult pav = pav_calibrate(sample);
  std::string csv = "threshold,calibrated,calibrated_exact\n";
  for (std::size_t i = 0; i < pav.thresholds.size(); ++i) {
    csv += io::format_double(pav.thresholds[i]) + "," + io::format_double(pav.value(i)) + "," +
           rational_string(pav.values[i]) + "\n";
  }
  io::write_file(path_in(rc, "pav.csv"), csv);
  out << pav.thresholds.size() << " unique values pooled into " << pav.blocks() << " blocks\n";

  nlohmann::json j;
  j["command"] = "pav";
  j["input"] = sample_json(rc.inputs[0], sample);
  j["blocks"] = pav.blocks();
  if (sample.n0() > 0 && sample.n1() > 0) {
    const EmpiricalRoc curve = empirical_roc(sample);
    const EmpiricalRoc hull = concave_hull(curve);
    std::string hull_csv = "far,hr,far_exact,hr_exact\n";
    for (std::size_t i = 0; i < hull.size(); ++i) {
      hull_csv += io::format_double(hull.far(i)) + "," + io::format_double(hull.hr(i)) + "," +
                  rational_string(hull.far_exact(i)) + "," + rational_string(hull.hr_exact(i)) + "\n";
    }
    io::write_file(path_in(rc, "hull.csv"), hull_csv);
    const ConcavityDiagnostics diag = concavity_diagnostics(sample);
    j["concavity"] = {{"curve_concave", diag.curve_concave},
                      {"lr_nondecreasing", diag.lr_nondecreasing},
                      {"cep_nondecreasing", diag.cep_nondecreasing}};
    j["empirical"] = io::to_json(curve);
    j["hull"] = io::to_json(hull);

    svg::Figure fig;
    fig.title = "empirical ROC curve and concave hull";
    fig.series.push_back(empirical_series(curve));
    svg::Series h = empirical_series(hull);
    h.color = "seagreen";
    h.dashed = true;
    h.label = "concave hull";
    fig.series.push_back(h);
    io::write_file(path_in(rc, "pav.svg"), svg::render(fig));
    out << "concave hull has " << hull.size() << " vertices; curve concave: " << (diag.curve_concave ? "yes" : "no")
        << "\n";
  }
  io::write_file(path_in(rc, "pav.json"), dump(j));
  out << "wrote " << path_in(rc, "pav.csv") << " and pav.json\n";
  return 0;
}

int cmd_plot(const RunConfig& rc, std::ostream& out, std::ostream&) {
  static const char* const kColors[] = {"firebrick", "royalblue", "darkorange", "seagreen", "purple"};
  svg::Figure fig;
  fig.title = "ROC curves";
  bool have_empirical = false;
  std::size_t color = 0;
  std::vector<std::string> used_stems;
  for (const auto& path : rc.inputs) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("model") || !j.contains("empirical") || !j.contains("result")) {
      throw ValidationError("'" + path + "' holds no fitted model (expected output of fit or band)");
    }
    const EmpiricalRoc curve = io::empirical_from_json(j.at("empirical"));
    const RocModel model = model_from_json(j.at("model"));
    const nlohmann::json& result = j.at("result");
    if (j.contains("band")) fig.bands.push_back(band_shape(j.at("band")));
    if (!have_empirical) {
      fig.series.push_back(empirical_series(curve));
      have_empirical = true;
    }
    const bool dashed = result.at("constraint").get<std::string>() == "concave";
    fig.series.push_back(model_series(curve, model, model_label(result), kColors[color++ % 5], dashed));
    std::string stem = fs::path(path).stem().string();
    if (std::count(used_stems.begin(), used_stems.end(), stem) > 0) stem += "_" + std::to_string(used_stems.size() + 1);
    used_stems.push_back(stem);
    const std::string csv_name = stem + ".curve.csv";
    io::write_file(path_in(rc, csv_name), io::curve_csv(curve, model));
    out << "wrote " << path_in(rc, csv_name) << "\n";
  }
  io::write_file(path_in(rc, "plot.svg"), svg::render(fig));
  out << "wrote " << path_in(rc, "plot.svg") << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.command) {
      case Command::fit: return cmd_fit(config, out, err);
      case Command::gof: return cmd_gof(config, out, err);
      case Command::compare: return cmd_compare(config, out, err);
      case Command::band: return cmd_band(config, out, err);
      case Command::pav: return cmd_pav(config, out, err);
      case Command::plot: return cmd_plot(config, out, err);
    }
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 3;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parametric ROC curve fitting by minimum L2 distance"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string family = "beta";
  std::string constraint = "unrestricted";

  auto add_common = [&](CLI::App* sub, bool fitting, bool random) {
    sub->add_option("--out", rc.out_dir, "Output directory (default $ROCFIT_OUTPUT_DIR or .)");
    if (fitting) {
      sub->add_option("--family", family, "binormal, beta, beta3g, beta3d, beta4")->capture_default_str();
      sub->add_option("--constraint", constraint, "unrestricted or concave")->capture_default_str();
      sub->add_option("--restarts", rc.restarts, "Simplex runs per fit")->capture_default_str();
    }
    if (random) sub->add_option("--seed", rc.seed, "Random seed")->capture_default_str();
  };

  struct Sub {
    const char* name;
    Command command;
    const char* help;
  };
  const Sub subs[] = {
      {"fit", Command::fit, "Fit a parametric ROC curve"},
      {"gof", Command::gof, "Monte Carlo goodness-of-fit test"},
      {"compare", Command::compare, "Equality tests for curves and AUCs of two independent samples"},
      {"band", Command::band, "Pointwise confidence band for the fitted curve"},
      {"pav", Command::pav, "Isotonic calibration and concave hull"},
      {"plot", Command::plot, "Render saved fit or band results to SVG"},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    const char* what = s.command == Command::plot ? "Result JSON files" : "CSV files with columns score,label";
    sub->add_option("inputs", rc.inputs, what)->required();
    const bool fitting = s.command == Command::fit || s.command == Command::gof || s.command == Command::compare ||
                         s.command == Command::band;
    const bool random = s.command == Command::gof || s.command == Command::band;
    add_common(sub, fitting, random);
    if (s.command == Command::gof) {
      sub->add_option("--M", rc.M, "Monte Carlo replicates")->capture_default_str();
      sub->add_flag("--replicates-csv", rc.replicates_csv, "Also write the replicate distances");
    }
    if (s.command == Command::band) {
      sub->add_option("--level", rc.level, "Band level")->capture_default_str();
      sub->add_option("--draws", rc.draws, "Parameter draws")->capture_default_str();
    }
    const Command command = s.command;
    sub->callback([&rc, command] { rc.command = command; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    rc.family = parse_family(family);
    rc.constraint = parse_constraint(constraint);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return run(rc, out, err);
}

}  // namespace rocfit::cli
