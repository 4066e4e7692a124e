#include "rydcav/runner.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "rydcav/config.hpp"
#include "rydcav/dataset.hpp"
#include "rydcav/error.hpp"
#include "rydcav/experiment.hpp"
#include "rydcav/fitting.hpp"
#include "rydcav/parallel.hpp"
#include "rydcav/units.hpp"

#ifndef RYDCAV_VERSION
#define RYDCAV_VERSION "dev"
#endif

namespace rydcav {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
  const RunOptions& options;
  RunConfig config;
  fs::path out_dir;
  std::ostream& log;
  int threads;
  ordered_json meta;

  void info(const std::string& msg) const {
    if (options.verbose) log << "[rydcav] " << msg << '\n';
  }

  fs::path output(const std::string& name) {
    meta["outputs"].push_back(name);
    return out_dir / name;
  }
};

std::ofstream open_table(const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kConfig, "cannot write " + path.string());
  return out;
}

ordered_json fit_json(const FitResult& fit) {
  ordered_json j;
  j["converged"] = fit.converged;
  j["iterations"] = fit.n_iterations;
  j["reduced_chi_square"] = fit.reduced_chi_square;
  j["gradient_norm"] = fit.gradient_norm;
  j["notes"] = fit.notes;
  return j;
}

struct OutputParam {
  std::string name;
  double value;
  double uncertainty;
};

void write_params(const fs::path& path, const std::vector<OutputParam>& params) {
  auto out = open_table(path);
  out << "name,value,uncertainty\n";
  for (const auto& p : params) {
    out << p.name << ',' << format_number(p.value) << ',' << format_number(p.uncertainty)
        << '\n';
  }
}

template <typename T>
T load_dataset(Context& ctx, const char* expected) {
  if (!ctx.options.data) {
    fail(ErrorCode::kConfig, ctx.options.command + " requires --data <path>");
  }
  auto report = read_dataset(*ctx.options.data);
  for (const auto& w : report.warnings) ctx.log << "warning: " << w << '\n';
  ctx.meta["warnings"] = report.warnings;
  if (!std::holds_alternative<T>(report.dataset)) {
    fail(ErrorCode::kData, ctx.options.data->string() + " is not a " + expected + " dataset");
  }
  return std::get<T>(std::move(report.dataset));
}

int simulate_rabi(Context& ctx) {
  const auto atom = ctx.config.atom();
  const auto mode = ctx.config.mode();
  const auto durations = ctx.config.rabi_durations();
  ctx.info("simulating " + std::to_string(durations.size()) + " pulse durations");
  const auto trace = simulate_rabi_trace(atom, mode, ctx.config.carrier(), durations,
                                         ctx.config.amplitude(), ctx.threads);
  write_dataset(ctx.output("rabi.csv"), trace);
  const auto peak = std::max_element(trace.population.begin(), trace.population.end());
  ctx.meta["results"]["peak_population"] = *peak;
  ctx.meta["results"]["peak_duration_s"] =
      trace.durations[static_cast<std::size_t>(peak - trace.population.begin())];
  return kExitOk;
}

int simulate_ramsey(Context& ctx) {
  const auto atom = ctx.config.atom();
  const auto mode = ctx.config.mode();
  const auto cfg = ctx.config.ramsey();
  ctx.info("simulating " + std::to_string(cfg.frequency_grid.size()) + " frequency points");
  const auto spectrum = simulate_ramsey_spectrum(atom, mode, cfg, ctx.threads);
  write_dataset(ctx.output("spectrum.csv"), spectrum);

  const auto peak = std::max_element(spectrum.population.begin(), spectrum.population.end());
  auto& results = ctx.meta["results"];
  results["peak_population"] = *peak;
  results["peak_frequency_hz"] = units::hertz(
      spectrum.omega[static_cast<std::size_t>(peak - spectrum.population.begin())]);
  try {
    results["fringe_fwhm_hz"] = units::hertz(fringe_fwhm(spectrum));
  } catch (const Error& e) {
    results["fringe_fwhm_hz"] = nullptr;
    ctx.meta["notes"].push_back(e.what());
  }
  return kExitOk;
}

int resonator_response(Context& ctx) {
  const auto mode = ctx.config.mode();
  const auto cfg = ctx.config.ramsey();
  {
    auto out = open_table(ctx.output("resonator_response.csv"));
    out << "frequency_hz,relative_power\n";
    for (double w : cfg.frequency_grid) {
      out << format_number(units::hertz(w)) << ','
          << format_number(lorentzian_power_response(mode, w)) << '\n';
    }
  }
  const auto seq = ramsey_pair(ctx.config.carrier(), cfg.pulse_duration, cfg.gap,
                               cfg.drive_amplitude);
  const auto grid = default_time_grid(mode, seq, cfg.ring_down_tail);
  const auto field = simulate_field(mode, seq, grid);
  {
    auto out = open_table(ctx.output("field_trace.csv"));
    out << "time_s,envelope_re,envelope_im,envelope_abs\n";
    for (std::size_t i = 0; i < field.size(); ++i) {
      const auto a = field.envelope()[i];
      out << format_number(field.times()[i]) << ',' << format_number(a.real()) << ','
          << format_number(a.imag()) << ',' << format_number(std::abs(a)) << '\n';
    }
  }
  auto& results = ctx.meta["results"];
  results["linewidth_fwhm_hz"] = units::hertz(mode.linewidth());
  results["ring_time_s"] = mode.ring_time();
  results["pulse_fwhm_hz"] = units::hertz(pulse_spectral_width(cfg.pulse_duration));
  return kExitOk;
}

int synth(Context& ctx) {
  const auto kind = ctx.config.synth_kind();
  const double sigma = ctx.config.noise_sigma();
  const auto seed = ctx.config.seed();
  if (kind == "ramsey") {
    const auto spectrum = generate_synthetic_spectrum(
        ctx.config.atom(), ctx.config.mode(), ctx.config.ramsey(), sigma, seed, ctx.threads);
    write_dataset(ctx.output("spectrum.csv"), spectrum);
  } else if (kind == "rabi") {
    const auto trace = generate_synthetic_rabi(ctx.config.rabi_params(),
                                               ctx.config.rabi_durations(), sigma, seed);
    write_dataset(ctx.output("rabi.csv"), trace);
  } else {
    fail(ErrorCode::kConfig, "synth.kind must be 'ramsey' or 'rabi', got '" + kind + "'");
  }
  ctx.meta["results"]["noise_sigma"] = sigma;
  return kExitOk;
}

int fit_rabi_command(Context& ctx) {
  const auto guess = ctx.config.rabi_guess();
  const auto opts = ctx.config.fit_options();
  const auto trace = load_dataset<RabiTrace>(ctx, "Rabi");
  const auto fit = fit_rabi(trace, guess, opts);

  write_params(ctx.output("fit_params.csv"),
               {{"omega0_hz", units::hertz(fit.value("omega0")),
                 units::hertz(fit.uncertainty("omega0"))},
                {"delta_abs_hz", units::hertz(fit.value("delta")),
                 units::hertz(fit.uncertainty("delta"))},
                {"t2_s", fit.value("t2"), fit.uncertainty("t2")}});
  {
    auto out = open_table(ctx.output("fit_curve.csv"));
    out << "duration_s,population\n";
    const RabiParams best{fit.value("omega0"), fit.value("delta"), fit.value("t2")};
    for (double t : trace.durations) {
      out << format_number(t) << ',' << format_number(rabi_population(t, best)) << '\n';
    }
  }
  ctx.meta["fit"] = fit_json(fit);
  return fit.converged ? kExitOk : kExitNoConvergence;
}

int fit_ramsey_command(Context& ctx) {
  const auto atom = ctx.config.atom();
  auto cfg = ctx.config.ramsey();
  const auto opts = ctx.config.fit_options();
  const auto spectrum = load_dataset<Spectrum>(ctx, "Ramsey");
  cfg.frequency_grid = spectrum.omega;

  const auto configured = ctx.config.ramsey_guess();
  const RamseyGuess guess = configured ? *configured : initial_ramsey_guess(spectrum, cfg, atom);
  ctx.meta["guess"] = {{"resonator_hz", units::hertz(guess.omega_res)},
                       {"q", guess.q_factor},
                       {"g_star_hz", units::hertz(guess.g_star)},
                       {"source", configured ? "config" : "data"}};
  ctx.info("fitting from resonator " + format_number(units::hertz(guess.omega_res)) +
           " Hz, Q " + format_number(guess.q_factor));

  const auto fit = fit_ramsey_spectrum(spectrum, cfg, atom, guess, opts, ctx.threads);
  write_params(ctx.output("fit_params.csv"),
               {{"resonator_hz", units::hertz(fit.value("omega_res")),
                 units::hertz(fit.uncertainty("omega_res"))},
                {"q", fit.value("q_factor"), fit.uncertainty("q_factor")},
                {"g_star_hz", units::hertz(fit.value("g_star")),
                 units::hertz(fit.uncertainty("g_star"))}});

  AtomParams best_atom = atom;
  best_atom.g_star = fit.value("g_star");
  const auto curve = simulate_ramsey_spectrum(
      best_atom, ResonatorMode{fit.value("omega_res"), fit.value("q_factor")}, cfg, ctx.threads);
  write_dataset(ctx.output("fit_curve.csv"), curve);
  ctx.meta["fit"] = fit_json(fit);
  return fit.converged ? kExitOk : kExitNoConvergence;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kGridTooCoarse:
    case ErrorCode::kMismatchedCarrier:
      return kExitConfig;
    case ErrorCode::kData:
    case ErrorCode::kFlatSpectrumUnfittable:
    case ErrorCode::kNoResolvablePeak:
      return kExitData;
    case ErrorCode::kSingularNormalMatrix:
    case ErrorCode::kModelEvaluationFailure:
      return kExitNoConvergence;
  }
  return kExitFailure;
}

void write_metadata(const Context& ctx, int status) {
  ordered_json meta = ctx.meta;
  meta["exit_code"] = status;
  std::ofstream out(ctx.out_dir / "metadata.json");
  if (out) out << meta.dump(2) << '\n';
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {
      "simulate-rabi", "simulate-ramsey", "fit-rabi", "fit-ramsey", "resonator-response", "synth"};
  return names;
}

int run(const RunOptions& options, std::ostream& log) {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    log << "error: unknown command '" << options.command << "'\n";
    return kExitConfig;
  }

  std::optional<Context> ctx;
  try {
    auto raw = KeyValueConfig::load(options.config);
    if (options.seed) {
      if (*options.seed < 0) fail(ErrorCode::kConfig, "--seed must be >= 0");
      raw.set("run.seed", std::to_string(*options.seed));
    }
    RunConfig config(std::move(raw));
    fs::path out_dir = options.out ? *options.out
                                   : fs::path(config.raw().find_string("output.dir").value_or("."));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::kConfig, "cannot create output directory " + out_dir.string());

    const int threads = options.threads > 0 ? options.threads : default_thread_count();
    ctx.emplace(Context{options, std::move(config), out_dir, log, threads, ordered_json::object()});
    ctx->meta["command"] = options.command;
    ctx->meta["version"] = RYDCAV_VERSION;
    ctx->meta["seed"] = ctx->config.seed();
    ctx->meta["config"] = ctx->config.raw().values();
    ctx->meta["outputs"] = ordered_json::array();
    ctx->meta["notes"] = ordered_json::array();
    ctx->meta["results"] = ordered_json::object();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }

  int status = kExitFailure;
  try {
    const std::string& cmd = options.command;
    if (cmd == "simulate-rabi") status = simulate_rabi(*ctx);
    else if (cmd == "simulate-ramsey") status = simulate_ramsey(*ctx);
    else if (cmd == "resonator-response") status = resonator_response(*ctx);
    else if (cmd == "synth") status = synth(*ctx);
    else if (cmd == "fit-rabi") status = fit_rabi_command(*ctx);
    else status = fit_ramsey_command(*ctx);
    if (status == kExitNoConvergence) log << "warning: fit did not converge\n";
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    ctx->meta["error"] = e.what();
    status = exit_code_for(e.code());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    ctx->meta["error"] = e.what();
    status = kExitFailure;
  }
  write_metadata(*ctx, status);
  return status;
}

}  // namespace rydcav
