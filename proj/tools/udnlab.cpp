// Command-line runner for the ultra-dense network experiments.
//
// Exit codes: 0 success, 1 invalid config or usage, 2 I/O failure,
// 3 numerical failure inside an experiment.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "udn/error.hpp"
#include "udn/experiment.hpp"

namespace
{
enum Exit
{
    ok = 0,
    invalid = 1,
    io = 2,
    numerical = 3
};

int do_run(std::string const& path, int workers,
           std::optional<std::string> const& output,
           std::optional<std::uint64_t> const& seed)
{
    auto doc = udn::read_config_file(path);
    if (doc.is_object())
    {
        if (seed)
            doc["master_seed"] = *seed;
        if (output)
            doc["output_dir"] = *output;
    }
    auto const config = udn::parse_config(doc);

    udn::RunResult result;
    try
    {
        result = udn::run_experiment(config, workers);
    }
    catch (udn::IoError const&)
    {
        throw;
    }
    catch (udn::Error const& e)
    {
        std::cerr << "udnlab: " << config.experiment << " failed: " << e.what()
                  << '\n';
        return numerical;
    }
    auto const dir = udn::write_run(result, config.output_dir);
    std::cout << dir.string() << '\n';
    return ok;
}

int do_validate(std::string const& path)
{
    auto const violations = udn::validate_config(udn::read_config_file(path));
    if (violations.empty())
    {
        std::cout << "ok\n";
        return ok;
    }
    for (auto const& v : violations)
        std::cout << v << '\n';
    return invalid;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ultra-dense network experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    int workers = 1;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("--config", config_path, "config file (JSON)")
        ->required();
    run->add_option("--workers", workers, "worker threads")
        ->check(CLI::Range(1, 1024));
    run->add_option("--output", output, "override output_dir");
    run->add_option("--seed", seed, "override master_seed");

    auto* validate = app.add_subcommand("validate", "check a config");
    validate->add_option("--config", config_path, "config file (JSON)")
        ->required();

    std::string name;
    auto* describe
        = app.add_subcommand("describe", "show fields and defaults");
    describe->add_option("experiment", name, "experiment name")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? ok : invalid;
    }

    try
    {
        if (*run)
            return do_run(config_path, workers, output, seed);
        if (*validate)
            return do_validate(config_path);
        std::cout << udn::describe_experiment(name);
        return ok;
    }
    catch (udn::ConfigError const& e)
    {
        for (auto const& v : e.violations())
            std::cerr << v << '\n';
        return invalid;
    }
    catch (udn::IoError const& e)
    {
        std::cerr << "udnlab: " << e.what() << '\n';
        return io;
    }
    catch (udn::InvalidParameter const& e)
    {
        std::cerr << "udnlab: " << e.what() << '\n';
        return invalid;
    }
    catch (std::exception const& e)
    {
        std::cerr << "udnlab: " << e.what() << '\n';
        return numerical;
    }
}
