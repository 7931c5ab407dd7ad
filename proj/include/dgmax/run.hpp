// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgmax/analysis.hpp"
#include "dgmax/field_state.hpp"
#include "dgmax/mesh.hpp"
#include "dgmax/scenarios.hpp"

namespace dgmax
{

class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

class TimeGridMismatch : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    std::string scenario = "cavity";
    int degree = 1;
    int n = 4;
    std::string mesh_file;  // overrides n when set
    std::optional<double> dt;
    std::optional<double> final_time;
    std::filesystem::path out_dir = "out";

    int error_stride = 1;                // error rows every stride steps; the last step is always kept
    std::vector<long> postprocess_steps;  // steps that also get err_post; the last step always does
    bool postprocess_all = false;
    std::vector<Probe> probes;  // replaces the scenario probes when non-empty
    std::vector<int> sweep;

    // Smooth sin^2 switch-on of the boundary data G over this many seconds; 0 keeps the
    // abrupt start. Only for scenarios without an exact solution.
    double incident_ramp = 0.0;

    // Reference run of compare_with_reference; 0 means degree + 2.
    int reference_degree = 0;
    int reference_dt_divisor = 3;
};

/// Throws ConfigError.
void validate(const RunConfig& config);

/// key = value lines, '#' comments. Keys: scenario, degree, n, mesh, dt, final_time, out,
/// error_stride, postprocess_steps (comma list or "all"), probe (name:x,y,z; repeatable),
/// sweep (comma list), incident_ramp, reference_degree, reference_dt_divisor.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
/// Applies one key/value pair; throws ConfigError on unknown keys or bad values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

struct ErrorSeries
{
    std::vector<long> step;
    std::vector<double> t;
    std::vector<double> err_raw;
    std::vector<double> err_post;  // NaN where the step was not postprocessed

    std::size_t size() const { return step.size(); }
    bool operator==(const ErrorSeries& other) const;
};

void write_error_csv(const ErrorSeries& series, std::ostream& out);
void write_error_csv(const ErrorSeries& series, const std::filesystem::path& path);
ErrorSeries read_error_csv(std::istream& in);
ErrorSeries read_error_csv(const std::filesystem::path& path);

struct RunReport
{
    std::string scenario;
    int degree = 0;
    int n = 0;  // 0 for mesh files
    double h = 0.0;
    double dt = 0.0;
    long steps = 0;
    double final_time = 0.0;
    int elements = 0;
    ErrorSeries errors_E;
    ErrorSeries errors_H;
    double final_E = 0.0;
    double final_post_E = 0.0;
    double final_H = 0.0;
    double final_post_H = 0.0;
    double max_moment_residual = 0.0;
};

/// Built-in scenario with the configuration's incident ramp applied.
Scenario configured_scenario(const RunConfig& config);

/// Mesh of the configuration: the file when given, the structured cube otherwise.
Mesh build_mesh(const RunConfig& config, const Scenario& scenario);

/// Maximum element edge length.
double mesh_size(const Mesh& mesh);

/// Single run: errors_E.csv, errors_H.csv, summary.json and snapshot.txt in out_dir.
/// Needs a scenario with an exact solution; SimulationDiverged propagates.
RunReport run(const RunConfig& config);

/// One run per n of config.sweep in out_dir/n<value>, plus out_dir/eoc.csv.
std::vector<RunReport> run_sweep(const RunConfig& config);

void write_state_snapshot(const FieldState& state, const std::filesystem::path& path);
FieldState read_state_snapshot(const std::filesystem::path& path);

/// Primary run against a run of degree reference_degree with dt / reference_dt_divisor on
/// the same mesh; every divisor-th reference step is compared at the probes.
/// Writes probe_errors.csv (probe, x, y, z, field, err, err_post) and summary.json.
std::vector<ProbeErrors> compare_with_reference(const RunConfig& config);

}  // namespace dgmax
