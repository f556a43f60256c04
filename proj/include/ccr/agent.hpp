#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccr/kind.hpp"
#include "ccr/operation.hpp"

namespace ccr {

struct AgentConfig {
    SiteId site = 0;
    Kind kind;
    std::string listen = "127.0.0.1:0";
    std::vector<std::string> connect;
    /// Commands are read from this file instead of stdin; the agent quits at
    /// its end.
    std::optional<std::string> script;
    /// `sync` returns after this long without traffic once cursors are level.
    unsigned sync_quiet_ms = 300;
    /// Upper bound for sync / wait commands.
    unsigned wait_timeout_ms = 20000;
    /// How long dials to --connect addresses are retried.
    unsigned connect_timeout_ms = 10000;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int fault = 3;
}  // namespace exit_code

/// Runs until `quit`, end of input, or a fault. REPL replies go to `out`,
/// diagnostics to the log (CCR_LOG sets the level).
int run_agent(const AgentConfig& cfg, std::ostream& out);

}  // namespace ccr
