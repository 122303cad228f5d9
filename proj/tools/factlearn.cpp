#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "factlearn/bench.hpp"
#include "factlearn/config.hpp"
#include "factlearn/error.hpp"
#include "factlearn/oracle.hpp"
#include "factlearn/pipeline.hpp"
#include "factlearn/report.hpp"
#include "factlearn/sqlgen.hpp"
#include "factlearn/synthetic.hpp"

namespace fs = std::filesystem;
using namespace factlearn;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kNotConverged = 2, kNumeric = 3 };

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << text;
}

// --out wins over the config's outputs; with neither, stdout.
void emit(const std::string& text, const std::string& out_flag, const JobConfig& config, const fs::path& configured) {
  if (!out_flag.empty()) {
    write_text(out_flag, text);
  } else if (!configured.empty()) {
    write_text(resolve(config, configured), text);
  } else {
    std::cout << text;
  }
}

struct Overrides {
  std::string mode;
  std::string theta0;
  std::optional<double> epsilon;
  std::string alpha_schedule;
  bool no_scaling = false;
  bool force_large = false;
  unsigned threads = 1;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mode", o.mode, "fact or noPre")->check(CLI::IsMember({"fact", "noPre", "nopre"}));
  cmd->add_option("--theta0", o.theta0, "Intercept rescaling: conv or labelavg")
      ->check(CLI::IsMember({"conv", "labelavg"}));
  cmd->add_option("--epsilon", o.epsilon, "Convergence threshold on the summed step");
  cmd->add_option("--alpha-schedule", o.alpha_schedule, "divide3 or bold")->check(CLI::IsMember({"divide3", "bold"}));
  cmd->add_flag("--no-scaling", o.no_scaling, "Train on the data as given");
  cmd->add_flag("--force-large", o.force_large, "Lift the materialized-join row guard");
  cmd->add_option("--threads", o.threads, "Workers for the materialized gradient")->check(CLI::PositiveNumber);
}

TrainOptions train_options(const JobConfig& config, const Overrides& o) {
  TrainOptions options;
  options.gd = config.gd;
  options.scaling = config.scaling && !o.no_scaling;
  options.theta0_mode = config.theta0_mode;
  if (!o.mode.empty()) {
    options.mode = parse_train_mode(o.mode);
  }
  if (!o.theta0.empty()) {
    options.theta0_mode = parse_intercept_mode(o.theta0);
  }
  if (o.epsilon) {
    options.gd.epsilon = *o.epsilon;
  }
  if (!o.alpha_schedule.empty()) {
    options.gd.alpha_schedule = parse_alpha_schedule(o.alpha_schedule);
  }
  options.join.force = o.force_large;
  options.threads = o.threads;
  return options;
}

int cmd_train(const std::string& config_path, const std::string& out, const Overrides& o) {
  const JobConfig config = load_config(config_path);
  const Job job = load_job(config);
  const TrainResult result = train(job.db, job.order, job.features, train_options(config, o));
  emit(model_json(result, job.features, {FACTLEARN_VERSION, config.hash}), out, config, config.outputs.model);
  if (!result.gd.converged) {
    std::cerr << "factlearn: gradient descent stopped without converging (" << result.gd.stop_reason << " after "
              << result.gd.iterations << " iterations)\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_cofactors(const std::string& config_path, const std::string& out, bool oracle, bool force_large) {
  const JobConfig config = load_config(config_path);
  const Job job = load_job(config);
  const FactorizedResult result = evaluate(job.order, job.db);
  const CofactorMatrix matrix = extract_cofactor_matrix(result, job.features);
  if (matrix.m() == 0.0) {
    std::cerr << "factlearn: warning: the join is empty; every cofactor is 0\n";
  }
  const Provenance provenance{FACTLEARN_VERSION, config.hash};
  std::optional<OracleComparison> comparison;
  if (oracle) {
    const Relation join = materialize_join(job.db, job.order, JoinOptions{10'000'000, force_large});
    comparison = compare_with_oracle(matrix, brute_cofactors(join, job.features));
    std::cerr << "oracle: join_rows=" << join.row_count()
              << " max_relative_deviation=" << comparison->max_relative_deviation << "\n";
  }
  fs::path target = out.empty() ? config.outputs.cofactors : fs::path(out);
  const bool csv = target.extension() == ".csv";
  const std::string text =
      csv ? cofactor_csv(matrix, provenance) : cofactor_json(matrix, comparison, result.stats, provenance);
  emit(text, out, config, config.outputs.cofactors);
  return kOk;
}

int cmd_sqlgen(const std::string& config_path, const std::string& out, bool no_scaling, bool teardown) {
  const JobConfig config = load_config(config_path);
  Job job = load_job(config);
  SqlOptions options;
  options.scaling = config.scaling && !no_scaling;
  options.teardown = teardown;
  std::optional<ScaleFactors> factors;
  Database scaled = job.db;
  VariableNode order = job.order;
  if (options.scaling) {
    factors = compute_scale_factors(job.db, job.order, job.features);
    apply_scaling(scaled, order, *factors);
  }
  SqlScript script;
  script.add(sql_header({FACTLEARN_VERSION, config.hash}));
  script.append(emit_script(job.db, order, job.features, factors ? &*factors : nullptr, options));
  emit(script.text(), out, config, config.outputs.sql);
  return kOk;
}

struct GenFlags {
  std::string schema = "stark";
  std::size_t rows = 1000;
  std::size_t fanout = 1;
  std::size_t dimensions = 2;
  double noise = 0.0;
  std::uint64_t seed = 42;
  std::vector<double> theta;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g) {
  cmd->add_option("--schema", g.schema, "fig1 or stark")->check(CLI::IsMember({"fig1", "stark"}));
  cmd->add_option("--rows", g.rows, "Rows per relation (stark: fact rows)");
  cmd->add_option("--fanout", g.fanout, "Dimension rows per key (stark)")->check(CLI::PositiveNumber);
  cmd->add_option("--dimensions", g.dimensions, "Dimension tables (stark)")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", g.noise, "Gaussian noise sigma on the label");
  cmd->add_option("--seed", g.seed, "Random seed");
  cmd->add_option("--theta", g.theta, "Feature coefficients then the intercept")->delimiter(',');
}

GenParams gen_params(const GenFlags& g) {
  GenParams params;
  params.schema = parse_schema_kind(g.schema);
  params.rows_per_relation = g.rows;
  params.fanout = g.fanout;
  params.dimensions = g.dimensions;
  params.noise_sigma = g.noise;
  params.seed = g.seed;
  params.theta_expected = g.theta;
  return params;
}

int cmd_gen(const GenFlags& g, const std::string& out) {
  if (out.empty()) {
    throw ConfigError("gen needs --out <directory>");
  }
  const SyntheticData data = gen_synthetic(gen_params(g));
  const fs::path dir = out;
  fs::create_directories(dir);
  JobConfig config;
  for (const std::string& name : data.db.names()) {
    const Relation& relation = data.db.get(name);
    save_csv(relation, dir / (name + ".csv"));
    config.database.push_back(
        {name, name + ".csv", {relation.attributes().begin(), relation.attributes().end()}, {}});
  }
  config.variable_order = data.order.children;
  config.intercept = data.order.name;
  config.feature_order = data.features.columns();
  config.outputs.model = "model.json";
  write_text(dir / "job.json", config_to_json(config));
  std::string expected = "{\n  \"feature_order\": [";
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    expected += (i ? ", \"" : "\"") + data.features[i] + "\"";
  }
  expected += "],\n  \"theta_expected\": [";
  for (std::size_t i = 0; i < data.theta_expected.size(); ++i) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", data.theta_expected[i]);
    expected += (i ? ", " : "") + std::string(buffer);
  }
  expected += "]\n}\n";
  write_text(dir / "expected.json", expected);
  std::cout << "wrote " << data.db.size() << " relations and job.json to " << dir.string() << "\n";
  return kOk;
}

int cmd_bench(const std::string& config_path, const GenFlags& g, const std::string& modes, unsigned reps, bool warmup,
              const std::string& out, const Overrides& o) {
  BenchOptions options;
  options.modes.clear();
  for (const auto& part : CLI::detail::split(modes, ',')) {
    options.modes.push_back(parse_train_mode(part));
  }
  options.repetitions = reps;
  options.warmup = warmup;
  options.threads = o.threads;
  options.join.force = o.force_large;
  Provenance provenance{FACTLEARN_VERSION, ""};
  BenchReport report{FeatureOrder({"y", "T"}), 0, {}, {}};
  auto apply = [&](const TrainOptions& t) {
    options.gd = t.gd;
    options.scaling = t.scaling;
    options.theta0_mode = t.theta0_mode;
  };
  if (!config_path.empty()) {
    const JobConfig config = load_config(config_path);
    const Job job = load_job(config);
    apply(train_options(config, o));
    provenance.config_hash = config.hash;
    report = run_bench(job.db, job.order, job.features, options);
  } else {
    const GenParams params = gen_params(g);
    const SyntheticData data = gen_synthetic(params);
    JobConfig defaults;
    apply(train_options(defaults, o));
    options.theta_expected = data.theta_expected;
    provenance.config_hash = fnv1a_hex(std::string(to_string(params.schema)) + "/" + std::to_string(params.seed));
    report = run_bench(data.db, data.order, data.features, options);
  }
  report.provenance = provenance;
  std::cout << report.to_table();
  if (!out.empty()) {
    write_text(out, report.to_json());
  }
  return kOk;
}

// Bernoulli row sample of one relation; every other relation is copied.
int cmd_sample(const std::string& config_path, const std::string& relation, double fraction, std::uint64_t seed,
               const std::string& out) {
  if (out.empty()) {
    throw ConfigError("sample needs --out <directory>");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("--fraction must be in (0, 1]");
  }
  JobConfig config = load_config(config_path);
  const Job job = load_job(config);
  if (!job.db.contains(relation)) {
    throw ConfigError("sample: unknown relation " + relation);
  }
  const fs::path dir = out;
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(fraction);
  for (RelationSpec& spec : config.database) {
    const Relation& source = job.db.get(spec.name);
    if (spec.name == relation) {
      RelationBuilder builder(source.name(), {source.attributes().begin(), source.attributes().end()});
      std::vector<Value> row(source.column_count());
      for (std::size_t r = 0; r < source.row_count(); ++r) {
        if (!keep(rng)) {
          continue;
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
          row[c] = source.value(r, c);
        }
        builder.add_row(row);
      }
      save_csv(std::move(builder).build(), dir / (spec.name + ".csv"));
    } else {
      save_csv(source, dir / (spec.name + ".csv"));
    }
    spec.csv = spec.name + ".csv";
    spec.csv_options = {};
  }
  write_text(dir / "job.json", config_to_json(config));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factlearn: linear regression over joins via factorized cofactors"};
  app.set_version_flag("--version", std::string("factlearn ") + FACTLEARN_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  Overrides overrides;

  auto* train_cmd = app.add_subcommand("train", "Scale, factorize, run gradient descent and write the model");
  train_cmd->add_option("--config", config_path, "Job config")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", out, "Model JSON path");
  add_override_flags(train_cmd, overrides);

  bool oracle = false;
  bool force_large = false;
  auto* cof_cmd = app.add_subcommand("cofactors", "Write the cofactor matrix (JSON, or CSV for a .csv path)");
  cof_cmd->add_option("--config", config_path, "Job config")->required()->check(CLI::ExistingFile);
  cof_cmd->add_option("--out", out, "Output path");
  cof_cmd->add_flag("--oracle", oracle, "Also materialize the join and compare");
  cof_cmd->add_flag("--force-large", force_large, "Lift the materialized-join row guard");

  bool no_scaling = false;
  bool teardown = false;
  auto* sql_cmd = app.add_subcommand("sqlgen", "Emit the SQL script computing the cofactors");
  sql_cmd->add_option("--config", config_path, "Job config")->required()->check(CLI::ExistingFile);
  sql_cmd->add_option("--out", out, "Output .sql path");
  sql_cmd->add_flag("--no-scaling", no_scaling, "Skip the scaling stage");
  sql_cmd->add_flag("--teardown", teardown, "Append DROP statements");

  GenFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic database, job config and ground truth");
  add_gen_flags(gen_cmd, gen_flags);
  gen_cmd->add_option("--out", out, "Output directory")->required();

  std::string modes = "fact,noPre";
  unsigned reps = 1;
  bool warmup = false;
  auto* bench_cmd = app.add_subcommand("bench", "Time fact against noPre on a config or on generated data");
  bench_cmd->add_option("--config", config_path, "Job config (otherwise data is generated)")
      ->check(CLI::ExistingFile);
  add_gen_flags(bench_cmd, gen_flags);
  add_override_flags(bench_cmd, overrides);
  bench_cmd->add_option("--modes", modes, "Comma-separated modes");
  bench_cmd->add_option("--reps", reps, "Timed repetitions (median reported)")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--warmup", warmup, "One untimed run per mode first");
  bench_cmd->add_option("--out", out, "Report JSON path");

  std::string relation;
  double fraction = 0.1;
  std::uint64_t seed = 42;
  auto* sample_cmd = app.add_subcommand("sample", "Downsample one relation of a job into a new job directory");
  sample_cmd->add_option("--config", config_path, "Job config")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--relation", relation, "Relation to sample")->required();
  sample_cmd->add_option("--fraction", fraction, "Probability of keeping a row");
  sample_cmd->add_option("--seed", seed, "Random seed");
  sample_cmd->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*train_cmd) {
      return cmd_train(config_path, out, overrides);
    }
    if (*cof_cmd) {
      return cmd_cofactors(config_path, out, oracle, force_large);
    }
    if (*sql_cmd) {
      return cmd_sqlgen(config_path, out, no_scaling, teardown);
    }
    if (*gen_cmd) {
      return cmd_gen(gen_flags, out);
    }
    if (*bench_cmd) {
      return cmd_bench(config_path, gen_flags, modes, reps, warmup, out, overrides);
    }
    if (*sample_cmd) {
      return cmd_sample(config_path, relation, fraction, seed, out);
    }
  } catch (const NumericError& e) {
    std::cerr << "factlearn: numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const CsvError& e) {
    std::cerr << "factlearn: csv error at row " << e.row() << ", column " << e.column() << ": " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "factlearn: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "factlearn: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
