#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cavidyn/hamiltonian.hpp"
#include "cavidyn/hilbert.hpp"
#include "cavidyn/model.hpp"
#include "cavidyn/observables.hpp"
#include "cavidyn/propagator.hpp"
#include "cavidyn/spectra.hpp"

namespace cavidyn::io {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kMemoryGuard = 4,
};

/// Flat-key run configuration. Unknown keys are rejected; unspecified keys
/// fall back to the built-in defaults (101-point transfer grid on
/// [-1.5, 2.1] a0, 101-point HO cavity grid, dt 0.25 fs, t_f 1000 fs).
class RunConfig {
 public:
  RunConfig();
  static RunConfig from_file(const std::filesystem::path& p);
  static RunConfig from_json_text(const std::string& text);

  /// "key=value" override, value parsed as JSON (bare words become strings)
  void set(const std::string& key, const std::string& value);
  void merge(const nlohmann::json& flat);

  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  const nlohmann::json& raw() const { return data_; }

  /// FNV-1a over the canonical serialized form
  std::string hash() const;

  model::ModelParams model_params() const;
  hilbert::SpacePtr build_space() const;
  propagator::PropagationConfig propagation() const;
  observables::RecorderOptions recorder_options() const;
  observables::TimeSeriesMeta meta(const hilbert::ProductSpace& space) const;
  /// output root: $CAVIDYN_OUTPUT_ROOT / output.dir when the env var is set
  std::filesystem::path output_dir() const;

 private:
  nlohmann::json data_;
};

/// atomic text write (temp file + rename)
void write_text_atomic(const std::filesystem::path& p, const std::string& content);

void write_time_series(const std::filesystem::path& dir,
                       const observables::TimeSeries& ts);
void write_complex_series(const std::filesystem::path& dir,
                          const observables::ComplexTimeSeries& ts);
void write_spectrum(const std::filesystem::path& dir, const std::string& name,
                    const spectra::Spectrum& s, const nlohmann::json& sidecar);
observables::TimeSeries read_time_series(const std::filesystem::path& csv);

void emit_plot_script(const std::filesystem::path& dir);

/// per-mode ground factors for the product initial state (enol ground state
/// on each transfer grid, cavity vacuum on the HO grid)
hilbert::WaveFunction initial_state(const hilbert::SpacePtr& space,
                                    const model::ModelParams& params);

// subcommands; each returns a process exit code
int cmd_eigen(const RunConfig& cfg);
int cmd_propagate(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_spectrum(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& run_dir);

}  // namespace cavidyn::io
