#pragma once

// Flat key = value configuration with dotted section names, '#' comments.
// Frequencies are given in Hz and converted to rad/s by the accessors of
// RunConfig, never by callers.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rydcav/bloch.hpp"
#include "rydcav/experiment.hpp"
#include "rydcav/fitting.hpp"
#include "rydcav/rabi_model.hpp"
#include "rydcav/resonator.hpp"

namespace rydcav {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Throws kConfig naming the key when it is missing or unparsable.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;

  std::optional<double> find_double(const std::string& key) const;
  std::optional<std::string> find_string(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Typed view over a KeyValueConfig. Presets (key `preset`) supply defaults
/// that explicit keys override.
class RunConfig {
 public:
  explicit RunConfig(KeyValueConfig raw);

  const KeyValueConfig& raw() const { return raw_; }

  ResonatorMode mode() const;          ///< mode.frequency_hz, mode.q
  AtomParams atom() const;             ///< atom.frequency_hz, atom.g_star_hz, atom.t2_s
  RamseyConfig ramsey() const;         ///< sequence.* and grid.*
  double carrier() const;              ///< sequence.carrier_hz (rad/s)
  double amplitude() const;            ///< sequence.amplitude
  std::vector<double> rabi_durations() const;  ///< scan.start_s/stop_s/step_s
  RabiParams rabi_params() const;      ///< rabi.omega0_hz, rabi.delta_hz, atom.t2_s
  RabiParams rabi_guess() const;       ///< fit.guess.* falling back to rabi.*
  FitOptions fit_options() const;      ///< fit.max_iterations, fit.rel_cost_tol, fit.grad_tol
  std::optional<RamseyGuess> ramsey_guess() const;
  double noise_sigma() const;          ///< synth.noise_sigma
  std::string synth_kind() const;      ///< synth.kind: ramsey | rabi
  std::uint64_t seed() const;          ///< run.seed (default 1)

 private:
  KeyValueConfig raw_;
};

}  // namespace rydcav
