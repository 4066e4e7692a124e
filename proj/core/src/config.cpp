#include "rydcav/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "rydcav/error.hpp"
#include "rydcav/presets.hpp"
#include "rydcav/units.hpp"

namespace rydcav {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> inclusive_range(double start, double stop, double step,
                                    const std::string& what) {
  if (!(step > 0.0)) fail(ErrorCode::kConfig, what + ": step must be > 0");
  if (!(stop >= start)) fail(ErrorCode::kConfig, what + ": stop must be >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kConfig,
           source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      fail(ErrorCode::kConfig, source + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfig, "cannot open config file " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::find_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto v = find_string(key);
  if (!v) fail(ErrorCode::kConfig, "missing required key '" + key + "'");
  return *v;
}

std::optional<double> KeyValueConfig::find_double(const std::string& key) const {
  const auto v = find_string(key);
  if (!v) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
  if (ec != std::errc() || ptr != v->data() + v->size() || !std::isfinite(value)) {
    fail(ErrorCode::kConfig, "key '" + key + "': cannot parse '" + *v + "' as a number");
  }
  return value;
}

double KeyValueConfig::get_double(const std::string& key) const {
  if (!contains(key)) fail(ErrorCode::kConfig, "missing required key '" + key + "'");
  return *find_double(key);
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    fail(ErrorCode::kConfig, "key '" + key + "': cannot parse '" + v + "' as an integer");
  }
  return value;
}

RunConfig::RunConfig(KeyValueConfig raw) : raw_(std::move(raw)) {
  if (const auto name = raw_.find_string("preset")) {
    const auto& table = presets();
    const auto it = table.find(*name);
    if (it == table.end()) fail(ErrorCode::kConfig, "unknown preset '" + *name + "'");
    for (const auto& [key, value] : it->second) {
      if (!raw_.contains(key)) raw_.set(key, value);
    }
  }
}

ResonatorMode RunConfig::mode() const {
  return ResonatorMode{units::angular(raw_.get_double("mode.frequency_hz")),
                       raw_.get_double("mode.q")};
}

AtomParams RunConfig::atom() const {
  return AtomParams::with_dephasing(units::angular(raw_.get_double("atom.frequency_hz")),
                                    units::angular(raw_.get_double("atom.g_star_hz")),
                                    raw_.get_double("atom.t2_s"));
}

RamseyConfig RunConfig::ramsey() const {
  RamseyConfig cfg;
  cfg.pulse_duration = raw_.find_double("sequence.pulse_duration_s").value_or(50e-9);
  cfg.gap = raw_.find_double("sequence.gap_s").value_or(100e-9);
  cfg.drive_amplitude = raw_.get_double("sequence.amplitude");
  cfg.ring_down_tail = raw_.find_double("sequence.ring_down_tail_s");
  const auto hz = inclusive_range(raw_.get_double("grid.start_hz"),
                                  raw_.get_double("grid.stop_hz"),
                                  raw_.get_double("grid.step_hz"), "grid");
  cfg.frequency_grid.reserve(hz.size());
  for (double f : hz) cfg.frequency_grid.push_back(units::angular(f));
  return cfg;
}

double RunConfig::carrier() const {
  return units::angular(raw_.get_double("sequence.carrier_hz"));
}

double RunConfig::amplitude() const { return raw_.get_double("sequence.amplitude"); }

std::vector<double> RunConfig::rabi_durations() const {
  return inclusive_range(raw_.get_double("scan.start_s"), raw_.get_double("scan.stop_s"),
                         raw_.get_double("scan.step_s"), "scan");
}

RabiParams RunConfig::rabi_params() const {
  return RabiParams{units::angular(raw_.get_double("rabi.omega0_hz")),
                    units::angular(raw_.get_double("rabi.delta_hz")),
                    raw_.get_double("atom.t2_s")};
}

RabiParams RunConfig::rabi_guess() const {
  auto pick = [&](const std::string& guess_key, const std::string& fallback) {
    return raw_.contains(guess_key) ? raw_.get_double(guess_key) : raw_.get_double(fallback);
  };
  return RabiParams{units::angular(pick("fit.guess.omega0_hz", "rabi.omega0_hz")),
                    units::angular(pick("fit.guess.delta_hz", "rabi.delta_hz")),
                    pick("fit.guess.t2_s", "atom.t2_s")};
}

FitOptions RunConfig::fit_options() const {
  FitOptions opts;
  if (raw_.contains("fit.max_iterations")) {
    opts.max_iterations = static_cast<int>(raw_.get_int("fit.max_iterations"));
  }
  opts.rel_cost_tol = raw_.find_double("fit.rel_cost_tol").value_or(opts.rel_cost_tol);
  opts.grad_tol = raw_.find_double("fit.grad_tol").value_or(opts.grad_tol);
  return opts;
}

std::optional<RamseyGuess> RunConfig::ramsey_guess() const {
  if (!raw_.contains("fit.guess.resonator_hz")) return std::nullopt;
  return RamseyGuess{units::angular(raw_.get_double("fit.guess.resonator_hz")),
                     raw_.get_double("fit.guess.q"),
                     units::angular(raw_.get_double("fit.guess.g_star_hz"))};
}

double RunConfig::noise_sigma() const {
  return raw_.find_double("synth.noise_sigma").value_or(0.03);
}

std::string RunConfig::synth_kind() const {
  return raw_.find_string("synth.kind").value_or("ramsey");
}

std::uint64_t RunConfig::seed() const {
  if (!raw_.contains("run.seed")) return 1;
  const auto v = raw_.get_int("run.seed");
  if (v < 0) fail(ErrorCode::kConfig, "run.seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

}  // namespace rydcav
