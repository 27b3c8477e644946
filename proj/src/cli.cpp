#include "liftcal/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "liftcal/csv.hpp"
#include "liftcal/distributions.hpp"
#include "liftcal/error.hpp"
#include "liftcal/intervals.hpp"
#include "liftcal/lcd.hpp"
#include "liftcal/lifted_fit.hpp"
#include "liftcal/mcmc.hpp"
#include "liftcal/outliers.hpp"
#include "liftcal/synth.hpp"

#ifndef LIFTCAL_VERSION
#define LIFTCAL_VERSION "0.0.0"
#endif

namespace liftcal::cli {

namespace {

using json = nlohmann::json;

const std::string kResponse = "y";
const std::string kPrediction = "f_hat";
const std::string kModelPrefix = "f_hat:";

// Non-finite values are spelled out; JSON has no literal for them.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

struct Report {
  std::string command;
  json inputs = json::object();
  json parameters = json::object();
  json results = json::object();

  void input(const std::string& role, const std::string& path) {
    inputs[role] = {{"path", path}, {"sha256", sha256_file(path)}};
  }

  void write(std::ostream& out) const {
    json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["parameters"] = parameters;
    j["results"] = results;
    j["version"] = LIFTCAL_VERSION;
    out << j.dump(2) << '\n';
  }
};

Link parse_link(const std::string& s) {
  if (s == "identity") return Link::Identity;
  if (s == "logit") return Link::Logit;
  if (s == "log") return Link::Log;
  throw InvalidParameterError("unknown link '" + s + "'");
}

NullKind parse_null(const std::string& s, Link link) {
  if (s == "default") return default_null(link);
  if (s == "uniform") return NullKind::UniformBinary;
  if (s == "intercept") return NullKind::InterceptMle;
  throw InvalidParameterError("unknown null model '" + s + "'");
}

const char* null_name(NullKind k) { return k == NullKind::UniformBinary ? "uniform" : "intercept"; }

NoiseKind parse_family(const std::string& s) {
  if (s == "gaussian") return NoiseKind::Gaussian;
  if (s == "gumbel") return NoiseKind::Gumbel;
  throw InvalidParameterError("unknown noise family '" + s + "'");
}

CalibrationSet calibration_from(const Table& t, const std::string& column) {
  try {
    return CalibrationSet(t.column(kResponse), t.column(column));
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::Input) throw;
    throw InvalidInputError(t.source + ": " + e.what());
  }
}

json fit_json(const LiftedFit& fit) {
  return {{"beta0", num(fit.beta0_hat)},   {"beta1", num(fit.beta1_hat)},
          {"r_star", num(fit.r_star)},     {"r_star_squared", num(fit.r_star * fit.r_star)},
          {"s_y", num(fit.s_y)},           {"s_fhat", num(fit.s_fhat)},
          {"mean_y", num(fit.mean_y)},     {"mu_hat", num(fit.mu_hat)},
          {"sigma_u", num(fit.sigma_u_hat)}, {"n_calb", fit.n_calb}};
}

json interval_json(const Interval& iv) {
  return {{"center", num(iv.center)}, {"lower", num(iv.lower)}, {"upper", num(iv.upper)}};
}

json lcd_json(const LcdReport& r) {
  json j = {{"model_id", r.model_id},
            {"model_loss", num(r.model_loss)},
            {"null_loss", num(r.null_loss)},
            {"beta0", num(r.lift.beta0)},
            {"beta1", num(r.lift.beta1)},
            {"converged", r.lift.converged}};
  j["lcd"] = r.lcd ? num(*r.lcd) : json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

// Every f_hat or f_hat:<label> column, in file order.
std::vector<ModelPredictions> model_columns(const Table& t) {
  std::vector<ModelPredictions> models;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    const auto& name = t.header[j];
    if (name == kPrediction) {
      models.push_back({name, t.columns[j]});
    } else if (name.rfind(kModelPrefix, 0) == 0 && name.size() > kModelPrefix.size()) {
      models.push_back({name.substr(kModelPrefix.size()), t.columns[j]});
    }
  }
  if (models.empty()) {
    throw InvalidInputError(t.source + ": no prediction columns ('f_hat' or 'f_hat:<label>')");
  }
  return models;
}

// Twice the negative log-likelihood of the lifted fit. The identity link uses
// the Gaussian likelihood profiled over the variance.
double deviance(const CalibrationSet& calib, Link link, const GlmFit& fit) {
  if (link != Link::Identity) return 2.0 * fit.loss;
  const double n = static_cast<double>(calib.size());
  if (!(fit.loss > 0.0)) {
    throw InvalidInputError("zero residual sum of squares: Gaussian likelihood is unbounded");
  }
  return n * std::log(2.0 * std::numbers::pi * fit.loss / n) + n;
}

std::vector<double> default_levels() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}; }

struct Options {
  std::string calib, test, out, in;
  std::string column = kPrediction;
  std::string link = "identity";
  std::string null_model = "default";
  std::string family = "gaussian";
  std::string criterion = "aic";
  std::string baseline = "ols";
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t draws = kDefaultLinfDraws;
  std::size_t grid = 50;
  std::size_t max_iterations = BcdOptions{}.max_iterations;
  std::size_t samples = 20000;
  std::size_t burn_in = 5000;
  std::size_t chains = 4;
  std::size_t params = 2;
  std::size_t n = 1000;
  std::size_t k = 5;
  double sigma_eps = 0.1;
  double train_fraction = 0.7;
  std::vector<double> levels = default_levels();
  std::optional<double> lambda;
};

void cmd_calibrate(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  r.input("calib", o.calib);
  r.parameters = {{"alpha", o.alpha}, {"seed", o.seed}, {"draws", o.draws}, {"column", o.column}};
  const auto calib = calibration_from(t, o.column);
  const auto fit = fit_lifted_linear(calib);
  r.results["fit"] = fit_json(fit);
  const auto q = bivariate_t_linf_quantile(o.alpha, static_cast<DegreesOfFreedom>(calib.size()) - 2,
                                           Seed{o.seed}, o.draws);
  const auto test = consistency_test(fit, o.alpha, q.value);
  r.results["consistency"] = {{"statistic", num(test.statistic)},
                              {"threshold", num(test.threshold)},
                              {"threshold_se", num(q.standard_error)},
                              {"alpha", o.alpha},
                              {"reject", test.reject}};
}

void cmd_interval(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  const Table test = read_csv(o.test);
  r.input("calib", o.calib);
  r.input("test", o.test);
  r.parameters = {{"alpha", o.alpha}, {"column", o.column}};
  const auto fit = fit_lifted_linear(calibration_from(t, o.column));
  const auto& f0 = test.column(o.column);
  const auto ivs = prediction_intervals(fit, f0, o.alpha);
  r.results["fit"] = fit_json(fit);
  r.results["n_test"] = ivs.size();
  double width = 0.0;
  for (const auto& iv : ivs) width += iv.width();
  r.results["mean_width"] = num(ivs.empty() ? 0.0 : width / static_cast<double>(ivs.size()));
  if (test.find(kResponse)) r.results["coverage"] = num(empirical_coverage(ivs, test.column(kResponse)));

  if (!o.out.empty()) {
    Table out;
    std::vector<double> c, lo, hi, eta;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      c.push_back(ivs[i].center);
      lo.push_back(ivs[i].lower);
      hi.push_back(ivs[i].upper);
      eta.push_back(eta_hat(fit, f0[i]));
    }
    out.add_column(kPrediction, f0);
    out.add_column("center", c);
    out.add_column("lower", lo);
    out.add_column("upper", hi);
    out.add_column("eta_hat", eta);
    if (test.find(kResponse)) out.add_column(kResponse, test.column(kResponse));
    write_csv_file(o.out, out);
    r.results["output"] = o.out;
  } else {
    json arr = json::array();
    for (const auto& iv : ivs) arr.push_back(interval_json(iv));
    r.results["intervals"] = arr;
  }
}

void cmd_lcd(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  r.input("calib", o.calib);
  const Link link = parse_link(o.link);
  const NullKind kind = parse_null(o.null_model, link);
  r.parameters = {{"link", o.link}, {"null", null_name(kind)}, {"column", o.column}};
  const auto calib = calibration_from(t, o.column);
  const auto rep = lcd(calib, link, kind, o.column);
  r.results = lcd_json(rep);
  r.results["nagelkerke"] = num(nagelkerke_lcd(rep.model_loss, rep.null_loss, calib.size()));
}

void cmd_rank(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  r.input("calib", o.calib);
  const Link link = parse_link(o.link);
  const NullKind kind = parse_null(o.null_model, link);
  r.parameters = {{"link", o.link}, {"null", null_name(kind)}};
  const auto models = model_columns(t);
  const auto ranking = rank_models(t.column(kResponse), models, link, kind);
  json arr = json::array();
  json order = json::array();
  for (const auto& rep : ranking) {
    arr.push_back(lcd_json(rep));
    order.push_back(rep.model_id);
  }
  r.results["ranking"] = arr;
  r.results["order"] = order;
}

void cmd_mic(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  r.input("calib", o.calib);
  const Link link = parse_link(o.link);
  if (o.criterion != "aic" && o.criterion != "bic") {
    throw InvalidParameterError("unknown criterion '" + o.criterion + "'");
  }
  r.parameters = {{"link", o.link}, {"criterion", o.criterion}, {"params", o.params}};
  const auto models = model_columns(t);
  const auto& y = t.column(kResponse);
  const double complexity =
      o.criterion == "aic" ? aic_complexity(o.params) : bic_complexity(o.params, y.size());

  std::vector<MicScore> scores;
  std::vector<std::vector<double>> preds;
  for (const auto& m : models) {
    const CalibrationSet calib(y, m.predictions);
    const auto fit = fit_lifted_glm(calib, link);
    scores.push_back(mic(deviance(calib, link, fit), complexity, m.label));
    preds.push_back(m.predictions);
  }
  const auto w = mic_probabilities(scores);
  const auto committee = committee_predict(preds, w);

  json arr = json::array();
  for (std::size_t k = 0; k < scores.size(); ++k) {
    arr.push_back({{"model_id", scores[k].model_id},
                   {"loss", num(scores[k].loss)},
                   {"complexity", num(scores[k].complexity)},
                   {"mic", num(scores[k].mic)},
                   {"probability", num(w[k])}});
  }
  r.results["scores"] = arr;
  if (!o.out.empty()) {
    Table out;
    out.add_column("committee", committee);
    write_csv_file(o.out, out);
    r.results["output"] = o.out;
  } else {
    json c = json::array();
    for (double v : committee) c.push_back(num(v));
    r.results["committee"] = c;
  }
}

json solution_json(const OutlierSolution& s) {
  json idx = json::array();
  for (auto i : s.outlier_indices) idx.push_back(i);
  return {{"beta0", num(s.beta0)},           {"beta1", num(s.beta1)},
          {"lambda", num(s.lambda)},         {"iterations", s.iterations},
          {"objective", num(s.objective)},   {"outlier_indices", idx},
          {"n_outliers", s.outlier_indices.size()}};
}

void cmd_outliers(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  r.input("calib", o.calib);
  r.parameters = {{"grid", o.grid}, {"column", o.column}, {"max_iterations", o.max_iterations}};
  if (o.lambda) r.parameters["lambda"] = *o.lambda;
  const auto reference = calibration_from(t, o.column);
  const auto fit = fit_lifted_linear(reference);
  std::optional<CalibrationSet> scanned;
  if (!o.test.empty()) {
    scanned = calibration_from(read_csv(o.test), o.column);
    r.input("test", o.test);
  }
  const CalibrationSet& calib = scanned ? *scanned : reference;
  BcdOptions bcd;
  bcd.max_iterations = o.max_iterations;

  OutlierSolution sol;
  try {
    if (o.lambda) {
      sol = detect_outliers(calib, *o.lambda, bcd);
    } else {
      auto sel = select_lambda(calib, reference, o.grid, bcd);
      json grid = json::array(), scores = json::array();
      for (std::size_t k = 0; k < sel.grid.size(); ++k) {
        grid.push_back(num(sel.grid[k]));
        scores.push_back(num(sel.scores[k]));
      }
      r.results["grid"] = grid;
      r.results["scores"] = scores;
      sol = std::move(sel.solution);
    }
  } catch (const OutlierNonConvergence& e) {
    throw NonConvergenceError(std::string(e.what()) + " (last objective " +
                              format_double(e.last_iterate().objective) + ")");
  }
  r.results["lambda_max"] = num(lambda_max(reference, fit));
  r.results["solution"] = solution_json(sol);

  if (!o.out.empty()) {
    Table out;
    std::vector<double> flag(sol.gamma.size());
    for (std::size_t i = 0; i < flag.size(); ++i) flag[i] = sol.gamma[i] != 0.0;
    out.add_column(kResponse, calib.responses());
    out.add_column(kPrediction, calib.predictions());
    out.add_column("gamma", sol.gamma);
    out.add_column("outlier", flag);
    write_csv_file(o.out, out);
    r.results["output"] = o.out;
  }
}

void cmd_mcmc_interval(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  const Table test = read_csv(o.test);
  r.input("calib", o.calib);
  r.input("test", o.test);
  r.parameters = {{"alpha", o.alpha},     {"family", o.family},   {"samples", o.samples},
                  {"burn_in", o.burn_in}, {"chains", o.chains},   {"seed", o.seed},
                  {"column", o.column}};
  const auto calib = calibration_from(t, o.column);
  McmcConfig cfg;
  cfg.m_samples = o.samples;
  cfg.burn_in = o.burn_in;
  cfg.n_chains = o.chains;
  cfg.seed = Seed{o.seed};
  const auto chain = sample_posterior(calib, parse_family(o.family), cfg);
  const auto diag = chain_diagnostics(chain);
  r.results["acceptance_rate"] = num(diag.acceptance_rate);
  r.results["ess"] = {{"beta0", num(diag.ess[0])}, {"beta1", num(diag.ess[1])},
                      {"log_scale", num(diag.ess[2])}};

  // Noise draws for the predictive sample use their own stream.
  const Seed noise_seed{o.seed ^ 0x9E3779B97F4A7C15ull};
  const auto& f0 = test.column(o.column);
  std::vector<Interval> ivs;
  ivs.reserve(f0.size());
  for (double f : f0) ivs.push_back(predictive_interval_mcmc(chain, f, o.alpha, noise_seed));
  r.results["n_test"] = ivs.size();
  if (test.find(kResponse)) r.results["coverage"] = num(empirical_coverage(ivs, test.column(kResponse)));

  if (!o.out.empty()) {
    Table out;
    std::vector<double> c, lo, hi;
    for (const auto& iv : ivs) {
      c.push_back(iv.center);
      lo.push_back(iv.lower);
      hi.push_back(iv.upper);
    }
    out.add_column(kPrediction, f0);
    out.add_column("center", c);
    out.add_column("lower", lo);
    out.add_column("upper", hi);
    if (test.find(kResponse)) out.add_column(kResponse, test.column(kResponse));
    write_csv_file(o.out, out);
    r.results["output"] = o.out;
  } else {
    json arr = json::array();
    for (const auto& iv : ivs) arr.push_back(interval_json(iv));
    r.results["intervals"] = arr;
  }
}

void cmd_simulate(const Options& o, Report& r) {
  if (o.out.empty()) throw InvalidParameterError("simulate needs --out");
  SynthConfig cfg;
  cfg.n = o.n;
  cfg.sigma_eps = o.sigma_eps;
  cfg.seed = Seed{o.seed};
  r.parameters = {{"n", o.n}, {"sigma_eps", o.sigma_eps}, {"seed", o.seed}};
  const auto d = gen_dataset(cfg);
  Table out;
  for (std::size_t j = 0; j < kSynthInputs; ++j) {
    std::vector<double> col(d.predictors.rows);
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = d.predictors(i, j);
    out.add_column("x" + std::to_string(j + 1), std::move(col));
  }
  out.add_column(kResponse, d.responses);
  out.add_column("truth", d.truth);
  write_csv_file(o.out, out);
  r.results = {{"output", o.out}, {"rows", d.responses.size()}, {"sha256", sha256_file(o.out)}};
}

void cmd_predict_baseline(const Options& o, Report& r) {
  if (o.out.empty()) throw InvalidParameterError("predict-baseline needs --out");
  const Table t = read_csv(o.in);
  r.input("data", o.in);
  r.parameters = {{"model", o.baseline}, {"k", o.k}, {"seed", o.seed},
                  {"train_fraction", o.train_fraction}};
  Baseline model;
  if (o.baseline == "mean") {
    model.kind = BaselineKind::Mean;
  } else if (o.baseline == "ols") {
    model.kind = BaselineKind::LinearOls;
  } else if (o.baseline == "knn") {
    model.kind = BaselineKind::Knn;
    model.k = o.k;
  } else {
    throw InvalidParameterError("unknown baseline '" + o.baseline + "'");
  }

  std::vector<std::size_t> inputs;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j].size() > 1 && t.header[j][0] == 'x') inputs.push_back(j);
  }
  if (inputs.empty()) throw InvalidInputError(o.in + ": no input columns x1, x2, ...");
  const auto& y = t.column(kResponse);
  Matrix x(t.rows(), inputs.size());
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < inputs.size(); ++j) x(i, j) = t.columns[inputs[j]][i];
  }

  const auto split = split_indices(t.rows(), Seed{o.seed}, o.train_fraction, 1.0 - o.train_fraction);
  std::vector<std::size_t> held = split.calibration;
  held.insert(held.end(), split.test.begin(), split.test.end());
  std::sort(held.begin(), held.end());
  const auto pred = baseline_predict(model, select_rows(x, split.train), select(y, split.train),
                                     select_rows(x, held));

  Table out;
  for (std::size_t j = 0; j < t.header.size(); ++j) out.add_column(t.header[j], select(t.columns[j], held));
  out.add_column(kPrediction, pred.predictions);
  write_csv_file(o.out, out);
  r.results = {{"output", o.out},
               {"train_rows", split.train.size()},
               {"rows", held.size()},
               {"ridge_fallback", pred.ridge_fallback}};
}

void cmd_coverage(const Options& o, Report& r) {
  const Table t = read_csv(o.calib);
  const Table test = read_csv(o.test);
  r.input("calib", o.calib);
  r.input("test", o.test);
  r.parameters = {{"levels", o.levels}, {"column", o.column}};
  const auto fit = fit_lifted_linear(calibration_from(t, o.column));
  const auto curve = reliability_curve(fit, calibration_from(test, o.column), o.levels);
  double worst = 0.0;
  json rows = json::array();
  for (std::size_t k = 0; k < curve.levels.size(); ++k) {
    worst = std::max(worst, std::fabs(curve.empirical[k] - curve.levels[k]));
    rows.push_back({{"level", num(curve.levels[k])}, {"empirical", num(curve.empirical[k])}});
  }
  r.results["curve"] = rows;
  r.results["max_abs_deviation"] = num(worst);
  if (!o.out.empty()) {
    Table out;
    out.add_column("level", curve.levels);
    out.add_column("empirical", curve.empirical);
    write_csv_file(o.out, out);
    r.results["output"] = o.out;
  }
}

int exit_code(ErrorCategory c) { return c == ErrorCategory::Input ? kExitInput : kExitNumerical; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Model-agnostic calibration, prediction intervals, LCD and outlier detection",
               "liftcal"};
  app.set_version_flag("--version", LIFTCAL_VERSION);
  app.require_subcommand(1);

  auto calib_opt = [&](CLI::App* s) {
    s->add_option("--calib", o.calib, "calibration CSV with columns y and f_hat")->required();
  };
  auto column_opt = [&](CLI::App* s) {
    s->add_option("--column", o.column, "prediction column")->capture_default_str();
  };
  auto alpha_opt = [&](CLI::App* s) {
    s->add_option("--alpha", o.alpha, "miscoverage level")->capture_default_str();
  };
  auto seed_opt = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "random seed")->capture_default_str();
  };
  auto out_opt = [&](CLI::App* s, const char* what) { s->add_option("--out", o.out, what); };
  auto link_opts = [&](CLI::App* s) {
    s->add_option("--link", o.link, "identity, logit or log")
        ->check(CLI::IsMember({"identity", "logit", "log"}))
        ->capture_default_str();
    s->add_option("--null", o.null_model, "default, uniform or intercept")
        ->check(CLI::IsMember({"default", "uniform", "intercept"}))
        ->capture_default_str();
  };

  std::map<CLI::App*, std::function<void(const Options&, Report&)>> handlers;

  auto* calibrate = app.add_subcommand("calibrate", "lifted fit and consistency test");
  calib_opt(calibrate);
  column_opt(calibrate);
  alpha_opt(calibrate);
  seed_opt(calibrate);
  calibrate->add_option("--draws", o.draws, "Monte Carlo draws for the threshold")->capture_default_str();
  handlers[calibrate] = cmd_calibrate;

  auto* interval = app.add_subcommand("interval", "Student-t prediction intervals");
  calib_opt(interval);
  interval->add_option("--test", o.test, "CSV with column f_hat (and optionally y)")->required();
  column_opt(interval);
  alpha_opt(interval);
  out_opt(interval, "write intervals as CSV");
  handlers[interval] = cmd_interval;

  auto* lcd_cmd = app.add_subcommand("lcd", "lifted coefficient of determination");
  calib_opt(lcd_cmd);
  column_opt(lcd_cmd);
  link_opts(lcd_cmd);
  handlers[lcd_cmd] = cmd_lcd;

  auto* rank = app.add_subcommand("rank", "rank every f_hat:<label> column by LCD");
  calib_opt(rank);
  link_opts(rank);
  handlers[rank] = cmd_rank;

  auto* mic_cmd = app.add_subcommand("mic", "MIC scores, probabilities and committee predictions");
  calib_opt(mic_cmd);
  mic_cmd->add_option("--link", o.link, "identity, logit or log")
      ->check(CLI::IsMember({"identity", "logit", "log"}))
      ->capture_default_str();
  mic_cmd->add_option("--criterion", o.criterion, "aic or bic")
      ->check(CLI::IsMember({"aic", "bic"}))
      ->capture_default_str();
  mic_cmd->add_option("--params", o.params, "parameters per model")->capture_default_str();
  out_opt(mic_cmd, "write committee predictions as CSV");
  handlers[mic_cmd] = cmd_mic;

  auto* outliers = app.add_subcommand("outliers", "l1-penalised outlier detection");
  calib_opt(outliers);
  column_opt(outliers);
  outliers->add_option("--test", o.test,
                       "scan these points instead; lambda_max still comes from --calib");
  outliers->add_option("--lambda", o.lambda, "fixed penalty; selected from a grid when absent");
  outliers->add_option("--grid", o.grid, "lambda grid size")->capture_default_str();
  outliers->add_option("--max-iterations", o.max_iterations, "coordinate descent cap")
      ->capture_default_str();
  out_opt(outliers, "write per-point offsets as CSV");
  handlers[outliers] = cmd_outliers;

  auto* mcmc = app.add_subcommand("mcmc-interval", "posterior predictive intervals by MCMC");
  calib_opt(mcmc);
  mcmc->add_option("--test", o.test, "CSV with column f_hat (and optionally y)")->required();
  column_opt(mcmc);
  alpha_opt(mcmc);
  seed_opt(mcmc);
  mcmc->add_option("--family", o.family, "gaussian or gumbel")
      ->check(CLI::IsMember({"gaussian", "gumbel"}))
      ->capture_default_str();
  mcmc->add_option("--samples", o.samples, "kept draws over all chains")->capture_default_str();
  mcmc->add_option("--burn-in", o.burn_in, "burn-in per chain")->capture_default_str();
  mcmc->add_option("--chains", o.chains, "parallel chains")->capture_default_str();
  out_opt(mcmc, "write intervals as CSV");
  handlers[mcmc] = cmd_mcmc_interval;

  auto* simulate = app.add_subcommand("simulate", "synthetic Doppler / damped-cosine data");
  simulate->require_subcommand(0, 1);
  simulate->add_option("--n", o.n, "rows")->capture_default_str();
  simulate->add_option("--sigma-eps", o.sigma_eps, "noise standard deviation")->capture_default_str();
  seed_opt(simulate);
  out_opt(simulate, "output CSV (x1..x10, y, truth)");
  handlers[simulate] = cmd_simulate;

  auto* baseline = simulate->add_subcommand(
      "predict-baseline", "fit a baseline on a training split, append f_hat to held-out rows");
  baseline->add_option("--in", o.in, "simulated CSV")->required();
  baseline->add_option("--model", o.baseline, "mean, ols or knn")
      ->check(CLI::IsMember({"mean", "ols", "knn"}))
      ->capture_default_str();
  baseline->add_option("--k", o.k, "neighbours for knn")->capture_default_str();
  baseline->add_option("--train-fraction", o.train_fraction, "training share")->capture_default_str();
  seed_opt(baseline);
  out_opt(baseline, "output CSV");
  handlers[baseline] = cmd_predict_baseline;

  auto* coverage = app.add_subcommand("coverage", "reliability curve of the t intervals");
  calib_opt(coverage);
  coverage->add_option("--test", o.test, "CSV with columns y and f_hat")->required();
  column_opt(coverage);
  coverage->add_option("--levels", o.levels, "nominal levels")->delimiter(',');
  out_opt(coverage, "write the curve as CSV");
  handlers[coverage] = cmd_coverage;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  CLI::App* chosen = nullptr;
  for (auto& [sub, fn] : handlers) {
    if (sub->parsed() && (sub != simulate || !baseline->parsed())) chosen = sub;
  }
  if (chosen == nullptr) {
    err << "no subcommand given\n";
    return kExitInput;
  }

  Report report;
  report.command = chosen == baseline ? "simulate predict-baseline" : chosen->get_name();
  try {
    handlers[chosen](o, report);
  } catch (const Error& e) {
    err << "liftcal " << report.command << ": " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "liftcal " << report.command << ": internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
  report.write(out);
  return kExitOk;
}

}  // namespace liftcal::cli
