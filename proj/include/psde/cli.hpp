#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "psde/convergence.hpp"
#include "psde/montecarlo.hpp"

namespace psde::cli {

using json = nlohmann::json;

enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_io = 3,
    exit_assertion = 4,
};

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class AssertionFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Default configurations per command; their keys are the accepted keys.
json dose_defaults();
json sensitivity_defaults();
json convergence_defaults();
json angular_defaults();
json calibrate_defaults();

/*!
 * Merge file values and then overrides into defaults.
 *
 * Unknown keys and type mismatches raise ConfigError naming the key.
 */
json resolve_config(const json& defaults, const json& file, const json& overrides);

//! Convert a flag string to JSON of the same kind as the default value.
json parse_flag_value(const std::string& key, const json& default_value,
                      const std::string& text);

json load_config_file(const std::string& path);

//! Resolved config as embedded in outputs (keys that cannot change results dropped).
json canonical(const json& resolved);

RunConfig to_run_config(const json& resolved);
ConvergenceSetup to_convergence_setup(const json& resolved);

//! Comment header lines shared by every CSV.
std::vector<std::string> provenance_lines(const json& resolved);

//! Write header comments, column header, and rows; throws IoError.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::vector<double>>& rows);

std::string format_number(double v);

//! Entry point for the psde executable.
int run(int argc, char** argv);

}  // namespace psde::cli
