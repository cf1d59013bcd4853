#include "dhp_cli/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "dhp/baselines.hpp"
#include "dhp/checkpoint.hpp"
#include "dhp/dhp_model.hpp"
#include "dhp/evaluate.hpp"
#include "dhp/simulate.hpp"
#include "dhp/training.hpp"
#include "json_config.hpp"

namespace dhp::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kCommands[] = {"fit", "evaluate", "predict", "simulate", "sweep", "export-dynamics"};

std::shared_ptr<spdlog::logger> logger() {
  if (auto existing = spdlog::get("dhp")) return existing;
  auto log = std::make_shared<spdlog::logger>("dhp", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  log->set_pattern("[%l] %v");
  spdlog::register_logger(log);
  return log;
}

void configure_logging() {
  auto log = logger();
  auto level = spdlog::level::info;
  if (const char* env = std::getenv("DHP_LOG_LEVEL")) {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; treat those as a typo and keep info.
    if (level == spdlog::level::off && std::string(env) != "off") level = spdlog::level::info;
  }
  log->set_level(level);
}

// Options shared by every command that reads an event file.
struct DataOptions {
  std::string path;
  std::string manifest;
  bool sort = false;
  std::optional<double> horizon;
};

void add_data_options(CLI::App* cmd, DataOptions& d, bool required = true) {
  auto* opt = cmd->add_option("--data", d.path, "Event file (.csv or .jsonl)")->check(CLI::ExistingFile);
  if (required) opt->required();
  cmd->add_option("--manifest", d.manifest, "Mark manifest (one label per line)")->check(CLI::ExistingFile);
  cmd->add_flag("--sort", d.sort, "Sort unordered input instead of rejecting it");
  cmd->add_option("--horizon", d.horizon, "Observation end, in file time units");
}

struct TrainOptions {
  std::string model = "dhp";
  std::string kernel = "pwl";
  double power = 2.0;
  std::size_t mixtures = 3;
  std::size_t layers = 2;
  std::size_t hidden = 8;
  bool pairwise = false;
  double lr = 0.002;
  std::size_t batch = 128;
  std::size_t epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  std::vector<double> split{0.7, 0.1, 0.2};
  double time_scale = 1.0;
  std::string time_unit = "s";
};

void add_training_options(CLI::App* cmd, TrainOptions& t) {
  cmd->add_option("--lr", t.lr, "ADAM learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--batch", t.batch, "Events per mini-batch")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", t.epochs, "Maximum epochs")->capture_default_str();
  cmd->add_option("--patience", t.patience, "Epochs without validation improvement before stopping")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", t.seed, "Seed for every random choice")->capture_default_str();
  cmd->add_option("--split", t.split, "Train, validation and test fractions")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  cmd->add_option("--time-scale", t.time_scale, "Multiplier applied to timestamps at load")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--time-unit", t.time_unit, "Unit of the scaled timestamps (ms, s, min, h, d)")->capture_default_str();
  cmd->add_option("--hidden", t.hidden, "Hidden units per network layer")->capture_default_str();
  cmd->add_option("--power", t.power, "Power-law kernel exponent")->capture_default_str();
  cmd->add_flag("--pairwise-decay", t.pairwise, "One decay per (target, source) pair");
}

TrainConfig train_config(const TrainOptions& t) {
  TrainConfig c;
  c.learning_rate = t.lr;
  c.batch_size = t.batch;
  c.max_epochs = t.epochs;
  c.patience = t.patience;
  c.seed = t.seed;
  c.validate();
  return c;
}

SplitSpec split_spec(const std::vector<double>& f) {
  SplitSpec s{f.at(0), f.at(1), f.at(2)};
  s.validate();
  return s;
}

EventSequence load_data(const DataOptions& d, double time_scale, const std::string& time_unit,
                        const std::vector<std::string>& manifest = {}) {
  LoadOptions opts;
  opts.sort = d.sort;
  opts.time_scale = time_scale;
  opts.time_unit = time_unit;
  if (!d.manifest.empty())
    opts.manifest = load_manifest(d.manifest);
  else if (!manifest.empty())
    opts.manifest = manifest;
  if (d.horizon) opts.horizon = *d.horizon * time_scale;
  auto seq = load_events(d.path, opts);
  logger()->info("loaded {} events over {} marks from {}", seq.size(), seq.num_marks(), d.path);
  return seq;
}

std::unique_ptr<PointProcessModel> make_model(const TrainOptions& t, std::size_t marks, double time_scale) {
  const KernelSpec kernel{parse_kernel_family(t.kernel), t.power};
  kernel.validate();
  if (t.model == "dhp")
    return std::make_unique<DhpModel>(
        DhpModel::create({marks, kernel, {t.mixtures, t.layers, t.hidden}, t.pairwise}, time_scale, t.seed));
  if (t.model == "hawkes") return std::make_unique<HawkesModel>(marks, kernel, t.pairwise);
  if (t.model == "hpp") return std::make_unique<HppModel>(marks);
  if (t.model == "rpp") return std::make_unique<RppModel>(marks);
  if (t.model == "selfcorrecting") return std::make_unique<SelfCorrectingModel>(marks);
  throw std::invalid_argument("unknown model type: " + t.model);
}

/// Default count interval: 15 minutes in the data's time unit.
double default_width(const std::string& unit) {
  if (unit == "ms") return 900000.0;
  if (unit == "s") return 900.0;
  if (unit == "min") return 15.0;
  if (unit == "h") return 0.25;
  if (unit == "d") return 15.0 / 1440.0;
  throw std::invalid_argument("no default interval width for time unit '" + unit + "'; pass --width");
}

// Shortest decimal text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
void write_text(const std::string& path, const T& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  writer(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

json windows_json(const SplitResult& parts) {
  auto w = [](const EventSequence& s) { return json::array({s.start(), s.horizon()}); };
  return {{"train", w(parts.train)}, {"validation", w(parts.validation)}, {"test", w(parts.test)}};
}

// Window selection shared by evaluate and predict.
struct WindowOptions {
  std::string split;
  std::optional<double> start;
  std::optional<double> end;
};

void add_window_options(CLI::App* cmd, WindowOptions& w) {
  auto* split = cmd->add_option("--split", w.split, "Window recorded at fit time: train, validation, test or all")
                    ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  auto* start = cmd->add_option("--start", w.start, "Window start, in file time units");
  auto* end = cmd->add_option("--end", w.end, "Window end, in file time units");
  split->excludes(start)->excludes(end);
}

EventSequence select_window(const Checkpoint& ck, const EventSequence& data, const WindowOptions& w) {
  if (w.start || w.end) {
    const double start = w.start ? *w.start * ck.time_scale : 0.0;
    const double end = w.end ? *w.end * ck.time_scale : data.horizon();
    return data.window(start, end);
  }
  const bool has_split = ck.training.contains("split");
  const std::string name = w.split.empty() ? (has_split ? "test" : "all") : w.split;
  if (name == "all") return data.window(0.0, data.horizon());
  if (!has_split) throw std::invalid_argument("checkpoint records no split windows; use --start/--end or --split all");
  const auto& range = ck.training.at("split").at(name);
  return data.window(range.at(0).get<double>(), range.at(1).get<double>());
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  DataOptions data;
  TrainOptions train;
  std::string out;
  std::string log;
};

void run_fit(const FitOptions& o) {
  auto log = logger();
  const auto seq = load_data(o.data, o.train.time_scale, o.train.time_unit);
  const auto parts = chronological_split(seq, split_spec(o.train.split));
  log->info("split: {} train, {} validation, {} test events", parts.train.scored_count(),
            parts.validation.scored_count(), parts.test.scored_count());

  auto model = make_model(o.train, seq.num_marks(), seq.horizon());
  const auto cfg = train_config(o.train);
  const std::string log_path = o.log.empty() ? o.out + ".log.jsonl" : o.log;
  std::ofstream progress(log_path, std::ios::binary);
  if (!progress) throw std::runtime_error("cannot write " + log_path);
  const auto report = fit(*model, parts.train, parts.validation, cfg, [&](const EpochRecord& r) {
    progress << to_json(r).dump() << '\n';
    progress.flush();
    log->info("epoch {:>3}  train {:.6f}  val {:.6f}", r.epoch, r.train_nll, r.val_nll);
  });
  log->info("best epoch {} with validation NLL {:.6f} per event", report.best_epoch, report.best_val_nll);

  Checkpoint ck;
  ck.mark_labels = seq.mark_labels();
  ck.time_scale = o.train.time_scale;
  ck.time_unit = o.train.time_unit;
  ck.training = {{"data", fs::path(o.data.path).filename().string()},
                 {"horizon", seq.horizon()},
                 {"split", windows_json(parts)},
                 {"config",
                  {{"learning_rate", cfg.learning_rate},
                   {"batch_size", cfg.batch_size},
                   {"max_epochs", cfg.max_epochs},
                   {"patience", cfg.patience},
                   {"seed", cfg.seed}}},
                 {"best_epoch", report.best_epoch},
                 {"best_val_nll", report.best_val_nll},
                 {"epochs_run", report.epochs.size() - 1},
                 {"stopped_early", report.stopped_early},
                 {"parameters", report.parameters}};
  ck.model = std::move(model);
  save_checkpoint(ck, o.out);
  log->info("checkpoint written to {}", o.out);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string model;
  DataOptions data;
  WindowOptions window;
  std::optional<double> width;
  bool no_residuals = false;
  std::string out;
  std::string csv;
};

void run_evaluate(const EvaluateOptions& o) {
  const auto ck = load_checkpoint(o.model);
  const auto data = load_data(o.data, ck.time_scale, ck.time_unit, ck.mark_labels);
  const auto seq = select_window(ck, data, o.window);
  const double width = o.width ? *o.width * ck.time_scale : default_width(ck.time_unit);
  auto report = evaluate(*ck.model, seq, width, !o.no_residuals);
  for (const auto& w : report.warnings) logger()->warn("{}", w);
  logger()->info("NLL {:.6f} per event over {} events, MAPE {:.4f}", report.nll.per_event, report.nll.num_events,
                 report.mape.mean);
  write_text(o.out, [&](std::ostream& out) { out << report.to_json(ck.mark_labels).dump(2) << '\n'; });
  if (!o.csv.empty())
    write_text(o.csv, [&](std::ostream& out) {
      EvaluationReport::write_csv_header(out);
      report.write_csv_row(out);
    });
}

// ---------------------------------------------------------------- predict

struct PredictOptions {
  std::string model;
  DataOptions data;
  WindowOptions window;
  std::optional<double> width;
  std::string out;
};

void run_predict(const PredictOptions& o) {
  const auto ck = load_checkpoint(o.model);
  const auto data = load_data(o.data, ck.time_scale, ck.time_unit, ck.mark_labels);
  const auto seq = select_window(ck, data, o.window);
  const double width = o.width ? *o.width * ck.time_scale : default_width(ck.time_unit);
  const auto bounds = interval_boundaries(seq.start(), seq.horizon(), width);
  const auto predicted = predict_counts(*ck.model, seq.events(), bounds);
  const auto observed = count_events(seq.events(), seq.num_marks(), bounds);
  write_text(o.out, [&](std::ostream& out) {
    out << "interval_start,interval_end,mark,predicted,observed\n";
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s)
      for (std::size_t m = 0; m < seq.num_marks(); ++m)
        out << num(bounds[s] / ck.time_scale) << ',' << num(bounds[s + 1] / ck.time_scale) << ',' << ck.mark_labels.at(m)
            << ',' << num(predicted(s, m)) << ',' << observed.counts[s][m] << '\n';
  });
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string model;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_events = 1'000'000;
  double refresh = 0.0;
  std::string inject;
  std::string out;
  std::string sidecar;
};

void run_simulate(const SimulateOptions& o) {
  auto log = logger();
  auto ck = load_checkpoint(o.model);
  std::unique_ptr<PointProcessModel> model = std::move(ck.model);
  if (!o.inject.empty()) {
    const auto* excitation = dynamic_cast<const ExcitationModel*>(model.get());
    if (!excitation) throw std::invalid_argument("--inject needs a Hawkes or DHP checkpoint");
    const auto profile = AnalyticProfile::parse(o.inject);
    model = std::make_unique<DhpModel>(inject_dynamics(*excitation, AnalyticDynamics(model->num_marks(), profile)));
  }
  const SimConfig cfg{o.horizon * ck.time_scale, o.seed, o.max_events, o.refresh * ck.time_scale};
  cfg.validate();
  const auto result = thinning_simulate(*model, cfg, ck.mark_labels);
  for (const auto& w : result.warnings) log->warn("{}", w);
  log->info("simulated {} events from {} candidates", result.sequence.size(), result.candidates);

  // Back to file time units so the output loads like the training data.
  std::vector<Event> events(result.sequence.events().begin(), result.sequence.events().end());
  for (auto& e : events) e.time /= ck.time_scale;
  const EventSequence written(std::move(events), result.sequence.num_marks(), o.horizon, ck.mark_labels, ck.time_unit);
  write_text(o.out, [&](std::ostream& out) { save_events(written, out); });

  auto sidecar = simulation_sidecar(*model, cfg, result);
  sidecar["time_scale"] = ck.time_scale;
  sidecar["time_unit"] = ck.time_unit;
  sidecar["mark_manifest"] = ck.mark_labels;
  if (!o.inject.empty()) sidecar["injected_dynamics"] = o.inject;
  const std::string sidecar_path = o.sidecar.empty() ? o.out + ".json" : o.sidecar;
  write_text(sidecar_path, [&](std::ostream& out) { out << sidecar.dump(2) << '\n'; });
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  DataOptions data;
  TrainOptions train;
  std::vector<std::size_t> layers{1, 2, 3, 4, 5};
  std::vector<std::size_t> mixtures{1, 2, 3, 4, 5};
  std::vector<std::string> kernels{"exp", "pwl", "ray"};
  std::string out;
};

void run_sweep(const SweepOptions& o) {
  const auto seq = load_data(o.data, o.train.time_scale, o.train.time_unit);
  const auto parts = chronological_split(seq, split_spec(o.train.split));
  SweepSpec spec;
  spec.layers = o.layers;
  spec.mixtures = o.mixtures;
  spec.kernels.clear();
  for (const auto& k : o.kernels) spec.kernels.push_back(parse_kernel_family(k));
  spec.validate();
  const DhpConfig base{seq.num_marks(), {KernelFamily::PowerLaw, o.train.power}, {3, 2, o.train.hidden}, o.train.pairwise};
  const auto result = sweep(spec, base, seq.horizon(), parts.train, parts.validation, train_config(o.train));
  for (const auto& row : result.rows)
    if (!row.error.empty()) logger()->warn("{} C={} L={} failed: {}", to_string(row.kernel), row.mixtures, row.layers, row.error);
  if (result.best < result.rows.size()) {
    const auto& b = result.rows[result.best];
    logger()->info("best: {} C={} L={} validation NLL {:.6f}", to_string(b.kernel), b.mixtures, b.layers, b.val_nll);
  }
  write_text(o.out, [&](std::ostream& out) { result.write_csv(out); });
}

// ---------------------------------------------------------------- export-dynamics

struct ExportOptions {
  std::string model;
  std::size_t points = 200;
  double start = 0.0;
  std::optional<double> end;
  std::string out_dir;
};

void run_export(const ExportOptions& o) {
  const auto ck = load_checkpoint(o.model);
  const auto* model = dynamic_cast<const ExcitationModel*>(ck.model.get());
  if (!model) throw std::invalid_argument("export-dynamics needs a Hawkes or DHP checkpoint");
  double end = 0.0;
  if (o.end)
    end = *o.end;
  else if (ck.training.contains("horizon"))
    end = ck.training.at("horizon").get<double>() / ck.time_scale;
  else
    throw std::invalid_argument("checkpoint records no horizon; pass --end");
  if (!(end > o.start)) throw std::invalid_argument("--end must exceed --start");
  if (o.points < 2) throw std::invalid_argument("--points must be at least 2");

  std::vector<double> t(o.points), F(o.points), f(o.points);
  for (std::size_t k = 0; k < o.points; ++k)
    t[k] = (o.start + (end - o.start) * static_cast<double>(k) / static_cast<double>(o.points - 1)) * ck.time_scale;
  fs::create_directories(o.out_dir);
  for (std::size_t m = 0; m < model->num_marks(); ++m) {
    model->transform(m, t, F, f);
    const auto path = (fs::path(o.out_dir) / ("dynamics_" + ck.mark_labels.at(m) + ".csv")).string();
    write_text(path, [&](std::ostream& out) {
      out << "t,f,F\n";
      for (std::size_t k = 0; k < o.points; ++k) out << num(t[k] / ck.time_scale) << ',' << num(f[k]) << ',' << num(F[k]) << '\n';
    });
    logger()->info("wrote {}", path);
  }
}

std::string active_command(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i)
    for (const char* c : kCommands)
      if (args[i] == c) return c;
  return {};
}

}  // namespace

int run(const std::vector<std::string>& args) {
  configure_logging();
  CLI::App app{"Dynamic Hawkes process toolkit", "dhp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "JSON file supplying flag values (command line wins)");
  app.config_formatter(std::make_shared<JsonConfig>(active_command(args)));

  FitOptions fit_o;
  auto* fit_cmd = app.add_subcommand("fit", "Train a model and write a checkpoint");
  add_data_options(fit_cmd, fit_o.data);
  fit_cmd->add_option("--model", fit_o.train.model, "dhp, hawkes, hpp, rpp or selfcorrecting")
      ->capture_default_str()
      ->check(CLI::IsMember({"dhp", "hawkes", "hpp", "rpp", "selfcorrecting"}));
  fit_cmd->add_option("--kernel", fit_o.train.kernel, "Kernel family: exp, pwl or ray")->capture_default_str();
  fit_cmd->add_option("--mixtures", fit_o.train.mixtures, "Mixture components")->capture_default_str();
  fit_cmd->add_option("--layers", fit_o.train.layers, "Network layers")->capture_default_str();
  add_training_options(fit_cmd, fit_o.train);
  fit_cmd->add_option("--out", fit_o.out, "Checkpoint path")->required();
  fit_cmd->add_option("--log", fit_o.log, "Training log (JSON lines); defaults to <out>.log.jsonl");

  EvaluateOptions eval_o;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint on held-out events");
  eval_cmd->add_option("--model", eval_o.model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  add_data_options(eval_cmd, eval_o.data);
  add_window_options(eval_cmd, eval_o.window);
  eval_cmd->add_option("--width", eval_o.width, "Count interval width in file time units (default 15 minutes)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--no-residuals", eval_o.no_residuals, "Skip time-rescaling diagnostics");
  eval_cmd->add_option("--out", eval_o.out, "Report JSON path (default stdout)");
  eval_cmd->add_option("--csv", eval_o.csv, "Also write a one-row CSV summary");

  PredictOptions pred_o;
  auto* pred_cmd = app.add_subcommand("predict", "Expected counts per interval and mark");
  pred_cmd->add_option("--model", pred_o.model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  add_data_options(pred_cmd, pred_o.data);
  add_window_options(pred_cmd, pred_o.window);
  pred_cmd->add_option("--width", pred_o.width, "Interval width in file time units (default 15 minutes)")
      ->check(CLI::PositiveNumber);
  pred_cmd->add_option("--out", pred_o.out, "Counts CSV path (default stdout)");

  SimulateOptions sim_o;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample events from a checkpoint by thinning");
  sim_cmd->add_option("--model", sim_o.model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--horizon", sim_o.horizon, "Simulation end, in file time units")
      ->required()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_o.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--max-events", sim_o.max_events, "Event cap")->capture_default_str();
  sim_cmd->add_option("--refresh", sim_o.refresh, "Bound lookahead in file time units (default horizon/100)");
  sim_cmd->add_option("--inject", sim_o.inject, "Replace the dynamics: constant:c, ramp:a,b or piecewise:t0=v0,t1=v1");
  sim_cmd->add_option("--out", sim_o.out, "Events CSV path")->required();
  sim_cmd->add_option("--sidecar", sim_o.sidecar, "Sidecar JSON path; defaults to <out>.json");

  SweepOptions sweep_o;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid search over kernels, mixtures and layers");
  add_data_options(sweep_cmd, sweep_o.data);
  sweep_cmd->add_option("--layers", sweep_o.layers, "Layer choices")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--mixtures", sweep_o.mixtures, "Mixture choices")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--kernels", sweep_o.kernels, "Kernel choices")->delimiter(',')->capture_default_str();
  add_training_options(sweep_cmd, sweep_o.train);
  sweep_cmd->add_option("--out", sweep_o.out, "Results CSV path")->required();

  ExportOptions exp_o;
  auto* exp_cmd = app.add_subcommand("export-dynamics", "Write (t, f, F) on a grid, one CSV per mark");
  exp_cmd->add_option("--model", exp_o.model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--points", exp_o.points, "Grid points")->capture_default_str();
  exp_cmd->add_option("--start", exp_o.start, "Grid start, in file time units")->capture_default_str();
  exp_cmd->add_option("--end", exp_o.end, "Grid end (default: the training horizon)");
  exp_cmd->add_option("--out-dir", exp_o.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) run_fit(fit_o);
    if (*eval_cmd) run_evaluate(eval_o);
    if (*pred_cmd) run_predict(pred_o);
    if (*sim_cmd) run_simulate(sim_o);
    if (*sweep_cmd) run_sweep(sweep_o);
    if (*exp_cmd) run_export(exp_o);
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv, argv + argc));
}

}  // namespace dhp::cli
