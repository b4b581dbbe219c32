#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "udn/channel.hpp"
#include "udn/coordination.hpp"
#include "udn/error.hpp"
#include "udn/montecarlo.hpp"
#include "udn/planner.hpp"

namespace udn
{

//! Config rejected; one message per offending field.
class ConfigError : public Error
{
  public:
    explicit ConfigError(std::vector<std::string> violations);

    std::vector<std::string> const& violations() const noexcept
    {
        return violations_;
    }

  private:
    std::vector<std::string> violations_;
};

//! The six experiment names, in documentation order.
std::vector<std::string> const& experiment_names();

/*!
 * Parsed experiment description.
 *
 * Only fields relevant to `experiment` are read; the rest keep their
 * defaults. `source` is the JSON the config was parsed from.
 */
struct ExperimentConfig
{
    std::string experiment;
    std::uint64_t master_seed = 0;
    std::string output_dir = "results";
    ChannelParams channel;

    // Typical-UE experiments
    double lambda_an = 100;
    double lambda_ue = 100;
    std::size_t n_trials = 100000;
    InterfererActivity activity = InterfererActivity::load_based;
    std::vector<double> theta_db_grid;
    EngineKind engine = EngineKind::semianalytic;
    std::size_t n_grid = 512;

    // Planning
    std::vector<double> r0_grid;
    double tau_lo = 1e-3;
    double tau_hi = 1e3;
    double tolerance = 0.01;
    double mc_lambda_an = 100;
    double base_lambda_an = 5;
    double base_lambda_ue = 100;
    double densification_factor = 100;
    std::vector<double> x_grid;

    // Coordination
    CurveSpec curve;
    std::vector<PolicyId> policies;
    std::vector<double> target_rates;

    nlohmann::json source;
};

//! Parse and validate; throws ConfigError listing every violation.
ExperimentConfig parse_config(nlohmann::json const& doc);

//! Read a JSON file. Throws IoError if unreadable, ConfigError if malformed.
nlohmann::json read_config_file(std::filesystem::path const& path);

//! Violations for a config document (empty when it is valid).
std::vector<std::string> validate_config(nlohmann::json const& doc);

//! Human-readable schema and defaults; throws InvalidParameter if unknown.
std::string describe_experiment(std::string const& name);

//! FNV-1a hash of the canonical config text, as 16 hex digits.
std::string config_hash(nlohmann::json const& doc);

struct RunResult
{
    nlohmann::json record;
    //! (file name, CSV text) in emission order
    std::vector<std::pair<std::string, std::string>> tables;
};

//! Execute an experiment. Output depends only on the config, not on workers.
RunResult run_experiment(ExperimentConfig const& config, int workers = 1);

/*!
 * Persist to <root>/<experiment>/<timestamp>-<seed>/ as result.json plus one
 * CSV per table. Returns the directory. Throws IoError on failure.
 */
std::filesystem::path write_run(RunResult const& result,
                                std::filesystem::path const& root);

}  // namespace udn
