#include "banach_kl/cli.hpp"

#include "banach_kl/conditioning.hpp"
#include "banach_kl/dualbasis.hpp"
#include "banach_kl/greedy.hpp"
#include "banach_kl/hilbert_compare.hpp"
#include "banach_kl/io.hpp"
#include "banach_kl/oracle_wiener.hpp"
#include "banach_kl/sampling.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>

namespace banach_kl::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kFigureSteps = 8;

std::ofstream open_output(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  return os;
}

io::LoadedDecomposition load_or_decompose(const RunConfig &config) {
  if (!config.decomposition_file.empty()) {
    auto loaded = io::decomposition_from_json(io::read_json_file(config.decomposition_file));
    const auto &dec = loaded.decomposition;
    if (!dec.steps.empty()) require_psd_residual(dec.residual.matrix(), dec.steps.front().lambda);
    return loaded;
  }
  KernelSpec kernel = resolve_kernel(config);
  const Grid grid = resolve_grid(config, kernel);
  const GridCovariance cov = discretize(kernel, grid);
  Decomposition dec = decompose(cov, {config.max_steps, config.lambda_tol});
  if (!dec.steps.empty()) require_psd_residual(dec.residual.matrix(), dec.steps.front().lambda);
  return {std::move(kernel), std::move(dec)};
}

int cmd_decompose(const RunConfig &config, std::ostream &out) {
  const auto loaded = load_or_decompose(config);
  const Decomposition &dec = loaded.decomposition;
  const auto errors = truncation_errors(dec);

  out << std::setw(5) << "n" << std::setw(14) << "t_n" << std::setw(24) << "lambda" << std::setw(24)
      << "truncation_error" << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t n = 0; n < dec.steps.size(); ++n) {
    const auto &s = dec.steps[n];
    out << std::setw(5) << n << std::setw(14) << dec.grid()[s.pivot_index] << std::setw(24) << s.lambda
        << std::setw(24) << errors[n] << '\n';
  }
  out << "steps: " << dec.steps.size() << ", termination: " << to_string(dec.termination) << '\n';
  if (dec.termination == Termination::RankExhausted) out << "rank exhausted\n";
  if (!config.out.empty()) io::write_json_file(config.out, io::decomposition_to_json(dec, loaded.kernel, config.with_residual));
  return kOk;
}

int cmd_figure1(const RunConfig &config, std::ostream &out) {
  KernelSpec kernel = resolve_kernel(config);
  if (kernel.kind != KernelKind::BrownianMotion) throw ConfigError("figure1 needs the brownian_motion kernel");
  const Grid grid = resolve_grid(config, kernel);
  if (!grid.contains_dyadic_level(3)) throw ConfigError("figure1 needs a grid containing every dyadic point k/8");
  const Decomposition dec = decompose(discretize(kernel, grid), {kFigureSteps, config.lambda_tol});
  if (dec.steps.size() != kFigureSteps) throw InvariantError("figure1 decomposition stopped early");
  require_psd_residual(dec.residual.matrix(), dec.steps.front().lambda);

  const Matrix xi = gaussian_combinations(Matrix::Identity(kFigureSteps, kFigureSteps), 1, config.seed,
                                          Stream::KarhunenLoeve);
  const std::filesystem::path dir = config.out.empty() ? std::filesystem::path(".") : std::filesystem::path(config.out);
  std::filesystem::create_directories(dir);

  Matrix residual = dec.source.matrix();
  for (std::size_t n = 0; n < kFigureSteps; ++n) {
    const auto &s = dec.steps[n];
    residual = residual_after(dec, n + 1);
    const auto path = dir / ("figure1_step" + std::to_string(n) + ".csv");
    std::ofstream os = open_output(path.string());
    os << "# format_version: " << io::kFormatVersion << '\n';
    os << "t,component,residual_std\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    const double amplitude = std::sqrt(s.lambda) * xi(0, static_cast<Index>(n));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto ii = static_cast<Index>(i);
      os << grid[i] << ',' << amplitude * s.x(ii) << ',' << std::sqrt(std::max(residual(ii, ii), 0.0)) << '\n';
    }
    out << path.string() << '\n';
  }
  out << "max residual std after " << kFigureSteps << " steps: "
      << std::sqrt(std::max(residual.diagonal().maxCoeff(), 0.0)) << '\n';
  return kOk;
}

int cmd_sample(const RunConfig &config, std::ostream &out) {
  const auto loaded = load_or_decompose(config);
  const Decomposition &dec = loaded.decomposition;
  const std::size_t terms = config.n_terms.value_or(dec.steps.size());
  const SampleBatch batch = sample_paths(dec, terms, config.n_samples, config.seed);
  const SampleSummary summary = summarize(dec, batch);
  if (!config.out.empty()) {
    std::ofstream os = open_output(config.out);
    io::write_paths_csv(os, batch.paths, batch.grid);
  }
  const json j{{"format_version", io::kFormatVersion},
               {"n_terms", summary.n_terms},
               {"n_samples", summary.n_samples},
               {"seed", summary.seed},
               {"generator", kGeneratorName},
               {"max_cov_error", summary.max_cov_error}};
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_condition(const RunConfig &config, std::ostream &out) {
  const auto loaded = load_or_decompose(config);
  const Decomposition &dec = loaded.decomposition;
  const ConditionalMeasure cm = conditional_measure(dec, config.values);
  const Vector std_dev = cm.covariance.matrix().diagonal().cwiseMax(0.0).cwiseSqrt();

  json pinned = json::array();
  for (const auto &[k, t] : cm.pinned) {
    json coeffs = json::object();
    for (const auto &[i, w] : dec.steps[k].x_star.coefficients()) coeffs[std::to_string(i)] = w;
    pinned.push_back({{"step", k}, {"value", t}, {"x_star", std::move(coeffs)}});
  }
  json j{{"format_version", io::kFormatVersion},
         {"grid", io::grid_to_json(dec.grid())},
         {"pinned", std::move(pinned)},
         {"mean", std::vector<double>(cm.mean.data(), cm.mean.data() + cm.mean.size())},
         {"std", std::vector<double>(std_dev.data(), std_dev.data() + std_dev.size())}};

  if (config.n_samples > 0 && !dec.steps.empty()) {
    const Matrix paths = sample_conditional(cm, config.n_samples, config.seed, dec.steps.front().lambda);
    double max_pin_error = 0.0;
    for (const auto &[k, t] : cm.pinned) {
      const Vector coeffs = dec.steps[k].x_star.dense(dec.source.size());
      max_pin_error = std::max(max_pin_error, ((paths * coeffs).array() - t).abs().maxCoeff());
    }
    j["n_samples"] = config.n_samples;
    j["seed"] = config.seed;
    j["max_pin_error"] = max_pin_error;
  }
  if (!config.out.empty()) io::write_json_file(config.out, j);
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_decondition_check(const RunConfig &config, std::ostream &out) {
  const auto loaded = load_or_decompose(config);
  const Decomposition &dec = loaded.decomposition;
  if (dec.steps.empty()) throw ConfigError("decondition-check needs at least one decomposition step");
  const std::size_t n = std::min(config.condition_order, dec.steps.size() - 1);

  bool all_agree = true;
  json events = json::array();
  for (const auto &event : default_event_suite()) {
    const auto r = decondition_mc(dec, n, event, config.n_samples, config.seed);
    all_agree = all_agree && r.agree();
    events.push_back({{"t", event.t},
                      {"level", event.level},
                      {"direction", event.direction == Direction::LessEqual ? "<=" : ">"},
                      {"direct", r.direct},
                      {"direct_se", r.direct_se},
                      {"deconditioned", r.deconditioned},
                      {"deconditioned_se", r.deconditioned_se},
                      {"analytic", r.analytic},
                      {"agree", r.agree()}});
  }
  const json j{{"format_version", io::kFormatVersion},
               {"n", n},
               {"n_samples", config.n_samples},
               {"seed", config.seed},
               {"events", std::move(events)},
               {"all_agree", all_agree}};
  if (!config.out.empty()) io::write_json_file(config.out, j);
  out << j.dump(2) << '\n';
  return all_agree ? kOk : kCheckFailed;
}

int cmd_compare(const RunConfig &config, std::ostream &out) {
  const auto loaded = load_or_decompose(config);
  const Decomposition &dec = loaded.decomposition;
  if (dec.steps.empty()) throw ConfigError("compare needs at least one decomposition step");
  const SpectralDecomposition spectral = spectral_decompose(dec.source, trapezoid_weights(dec.grid()));
  const ComparisonReport report = compare_decompositions(dec, spectral, dec.steps.size() - 1);

  auto write = [&](std::ostream &os) {
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "# format_version: " << io::kFormatVersion << '\n';
    os << "n,greedy_lambda,spectral_lambda,greedy_partial_sum,spectral_partial_sum\n";
    for (const auto &row : report.rows) {
      os << row.n << ',' << row.greedy_lambda.value_or(std::numeric_limits<double>::quiet_NaN()) << ','
         << row.spectral_lambda << ',' << row.greedy_partial_sum << ',' << row.spectral_partial_sum << '\n';
    }
  };
  if (config.out.empty()) {
    write(out);
    return kOk;
  }
  std::ofstream os = open_output(config.out);
  write(os);
  out << "spectral trace: " << report.spectral_trace << '\n';
  out << "weighted diagonal sum: " << report.weighted_diagonal_sum << '\n';
  out << "greedy partial sum after " << dec.steps.size() << " steps: " << report.rows.back().greedy_partial_sum << '\n';
  if (report.greedy_exceeds_trace_at) {
    out << "greedy partial sums exceed the spectral trace from n = " << *report.greedy_exceeds_trace_at << '\n';
  }
  return kOk;
}

int cmd_oracle_check(const RunConfig &config, std::ostream &out) {
  const int level = config.dyadic_level.value_or(kDefaultDyadicLevel);
  const auto report = wiener::oracle_check(level);
  const json j{{"format_version", io::kFormatVersion},
               {"level", report.level},
               {"steps", report.steps},
               {"max_lambda_error", report.max_lambda_error},
               {"max_pivot_mismatch", report.max_pivot_mismatch},
               {"max_x_error", report.max_x_error}};
  if (!config.out.empty()) io::write_json_file(config.out, j);
  out << j.dump(2) << '\n';
  return report.ok() ? kOk : kCheckFailed;
}

void add_common_options(CLI::App &sub, RunConfig &config) {
  sub.add_option("--kernel", config.kernel, "brownian_motion, brownian_bridge, user_matrix, or a kernel JSON file");
  sub.add_option("--matrix-file", config.matrix_file, "JSON matrix for a user_matrix kernel");
  sub.add_option("--dyadic-level,--level", config.dyadic_level, "grid of 2^J + 1 uniform points")
      ->check(CLI::Range(0, 14));
  sub.add_option("--grid-file", config.grid_file, "JSON grid {\"points\": [...]} or {\"dyadic_level\": J}");
  sub.add_option("--steps", config.max_steps, "maximum number of greedy steps");
  sub.add_option("--tol", config.lambda_tol, "stop once lambda <= tol * lambda_0")->check(CLI::NonNegativeNumber);
  sub.add_option("--seed", config.seed, "random seed");
  sub.add_option("--samples", config.n_samples, "number of sampled paths");
  sub.add_option("--out", config.out, "output path");
  sub.add_option("--decomposition", config.decomposition_file, "read a decomposition JSON instead of decomposing");
}

}  // namespace

KernelSpec resolve_kernel(const RunConfig &config) {
  if (!config.matrix_file.empty()) {
    const json j = io::read_json_file(config.matrix_file);
    if (j.is_object()) return io::kernel_from_json(j);
    return KernelSpec::user_matrix(io::matrix_from_json(j));
  }
  const auto &k = config.kernel;
  if (k == "brownian_motion" || k == "brownian_bridge") return io::kernel_from_json(json{{"kind", k}});
  if (k == "user_matrix") throw ConfigError("user_matrix kernel needs --matrix-file");
  return io::kernel_from_json(io::read_json_file(k));
}

Grid resolve_grid(const RunConfig &config, const KernelSpec &kernel) {
  if (!config.grid_file.empty() && config.dyadic_level) throw ConfigError("use either --grid-file or --dyadic-level");
  if (!config.grid_file.empty()) return io::grid_from_json(io::read_json_file(config.grid_file));
  if (config.dyadic_level) return Grid::dyadic(*config.dyadic_level);
  if (kernel.kind == KernelKind::UserMatrix) return Grid::uniform(static_cast<std::size_t>(kernel.matrix.rows()));
  return Grid::dyadic(kDefaultDyadicLevel);
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Greedy Karhunen-Loeve decomposition of Gaussian measures on sup-norm grids"};
  app.require_subcommand(1);
  RunConfig config;
  std::function<int()> action;

  auto add = [&](const char *name, const char *help, int (*fn)(const RunConfig &, std::ostream &)) {
    CLI::App *sub = app.add_subcommand(name, help);
    add_common_options(*sub, config);
    sub->callback([&, fn] { action = [&, fn] { return fn(config, out); }; });
    return sub;
  };
  CLI::App *dec = add("decompose", "run the greedy decomposition and print the lambda table", cmd_decompose);
  dec->add_flag("--with-residual", config.with_residual, "include the residual matrix in the JSON output");
  add("figure1", "write per-step CSV files of the first 8 Wiener components", cmd_figure1);
  CLI::App *sample = add("sample", "draw truncated Karhunen-Loeve paths", cmd_sample);
  sample->add_option("--terms", config.n_terms, "number of series terms (default: all steps)");
  CLI::App *cond = add("condition", "conditional measure given pinned dual coordinates", cmd_condition);
  cond->add_option("--values", config.values, "pinned values t_0 t_1 ...")->delimiter(',');
  CLI::App *decond = add("decondition-check", "compare direct and deconditioned event probabilities",
                         cmd_decondition_check);
  decond->add_option("--order", config.condition_order, "condition on x*_0..x*_order");
  add("compare", "greedy versus spectral decomposition table", cmd_compare);
  add("oracle-check", "compare the engine with the closed-form Wiener decomposition", cmd_oracle_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return action();
  } catch (const InvariantError &e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace banach_kl::cli
