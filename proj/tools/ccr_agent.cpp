// ccr-agent: one replica site with a REPL and a line-delimited JSON transport.
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "ccr/agent.hpp"
#include "ccr/errors.hpp"

int main(int argc, char** argv)
{
    auto logger = spdlog::stderr_logger_mt("ccr");
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("CCR_LOG")) spdlog::set_level(spdlog::level::from_str(level));

    CLI::App app{"Collaborative replication agent"};
    ccr::AgentConfig cfg;
    std::string replica;
    std::string script;
    app.add_option("--site", cfg.site, "site id, unique per deployment")->required();
    app.add_option("--replica", replica, "replica kind")->required();
    app.add_option("--listen", cfg.listen, "HOST:PORT to accept peers on");
    app.add_option("--connect", cfg.connect, "HOST:PORT of a peer (repeatable)");
    app.add_option("--script", script, "read commands from FILE and quit at its end");
    app.add_option("--sync-quiet-ms", cfg.sync_quiet_ms, "traffic-free period that ends a sync");
    app.add_option("--wait-timeout-ms", cfg.wait_timeout_ms, "upper bound for sync and wait");
    app.add_option("--connect-timeout-ms", cfg.connect_timeout_ms, "how long dials are retried");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ccr::exit_code::config;
    }
    try {
        cfg.kind = ccr::Kind::parse(replica);
    } catch (const ccr::KindError& e) {
        std::cerr << "ccr-agent: " << e.what() << '\n';
        return ccr::exit_code::config;
    }
    if (!script.empty()) cfg.script = script;
    return ccr::run_agent(cfg, std::cout);
}
