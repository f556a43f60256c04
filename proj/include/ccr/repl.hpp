#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccr/protocol.hpp"

namespace ccr {

struct ReplCommand {
    enum class Verb {
        nothing,  // blank line or comment
        update,
        connect,
        disconnect,
        peers,
        show,
        history,
        quit,
        sync,        // block until the site and its peers are settled
        wait_peers,  // block until `count` peers are ready
        wait_ops,    // block until the history holds `count` operations
        sleep,       // milliseconds
        help,
    };
    Verb verb = Verb::nothing;
    Intent intent;
    std::string address;
    std::uint64_t count = 0;
};

/// Grammar (tokens are bare words or double-quoted strings with \" \\ \n \t):
///   connect ADDR | disconnect ADDR | peers | show | history | quit | help
///   sync | wait peers N | wait ops N | sleep MS
///   counter: incr N | decr N          addmult: add N | mult N
///   lww: write S                      eset: add S | rem S
///   queue: enq S | deq                text: ins K S | del K N
///   tuple: at I CMD                   map: upd KEY CMD
///   socialmedia: post KEY write S|comment S|uncomment S|like|dislike
/// Lines starting with '#' are comments. Throws ParseError.
ReplCommand parse_repl(const Kind& kind, std::string_view line);

/// Runs an update through the site. Returns the REPL reply ("ok $0.3",
/// "no effect" or "error: ...") and appends the messages to send.
std::string eval_update(Site& site, const Intent& in, std::vector<Outgoing>& out);

/// One operation per line: `$site.seq <body json>`.
std::string render_history(const Site& site);

std::string repl_help(const Kind& kind);

}  // namespace ccr
