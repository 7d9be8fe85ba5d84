// mcns: validate | evolve | rates | profiles
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcns/config.hpp"
#include "mcns/errors.hpp"
#include "mcns/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"compressible flow decay experiments"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir;
    int threads = 0;
    std::vector<std::string> overrides;
    std::string log_level = "warn";

    for (const char* name : {"validate", "evolve", "rates", "profiles"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key/value config file");
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--threads", threads, "FFT threads (overrides run.threads)")->check(CLI::PositiveNumber);
        sub->add_option("--override", overrides, "section.key=value, repeatable");
        sub->add_option("--log-level", log_level, "trace|debug|info|warn|error");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : mcns::kExitConfig;
    }
    spdlog::set_default_logger(spdlog::stderr_color_mt("mcns"));
    spdlog::set_level(spdlog::level::from_str(log_level));

    const std::string cmd = app.get_subcommands().front()->get_name();
    mcns::ExperimentConfig cfg;
    try {
        mcns::KeyValueFile kv = config_path.empty() ? mcns::KeyValueFile::parse("", "<defaults>")
                                                    : mcns::KeyValueFile::load(config_path);
        for (const auto& o : overrides) kv.set_override(o);
        if (!out_dir.empty()) kv.set_override("output.dir=" + out_dir);
        if (threads > 0) kv.set_override("run.threads=" + std::to_string(threads));
        cfg = mcns::build_config(kv);
    } catch (const mcns::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return mcns::kExitConfig;
    }
    return mcns::run_command(cmd, cfg, std::cout, std::cerr);
}
