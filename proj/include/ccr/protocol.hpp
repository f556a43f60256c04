#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccr/message.hpp"
#include "ccr/replicas.hpp"

namespace ccr {

struct PeerCursor {
    /// History operations already sent to the peer.
    std::size_t sent_len = 0;
    /// The peer's cumulative patch as far as we have received it.
    Patch recv_prefix;
    /// Set once the peer's Hello arrived; increments only go to ready peers.
    bool ready = false;

    std::size_t recv_len() const { return recv_prefix.size(); }
};

struct Outgoing {
    SiteId to = 0;
    Message msg;
};

struct UpdateResult {
    std::optional<Operation> op;
    std::vector<Outgoing> out;
};

/// One replica's side of the replication protocol. Not thread-safe: callers
/// serialize every entry point.
class Site {
public:
    Site(SiteId id, Kind kind);

    SiteId id() const { return id_; }
    const Kind& kind() const { return kind_; }
    const State& base() const { return base_; }
    const State& current() const { return current_; }
    const Patch& history() const { return history_; }
    std::uint64_t next_seq() const { return next_seq_; }
    const std::map<SiteId, PeerCursor>& peers() const { return peers_; }
    const PeerCursor* peer(SiteId id) const;
    std::string digest() const { return state_digest(kind_, current_); }

    bool faulted() const { return faulted_; }
    const std::string& fault_reason() const { return fault_reason_; }

    /// Opens a session with `peer` and returns the Hello to send it. Cursors
    /// of an earlier session are kept so a reconnect stays incremental.
    Hello connect(SiteId peer);
    /// Stops sending to `peer` until the next Hello.
    void disconnect(SiteId peer);

    /// Throws IntentError for malformed intents (state unchanged) and
    /// FaultError once the site is faulted.
    UpdateResult local_update(const Intent& in);

    /// `from` is the transport-level origin. Throws ProtocolError for
    /// messages from unknown peers or of another kind, FaultError when an
    /// integration fails (the site then stays faulted).
    std::vector<Outgoing> handle_message(SiteId from, const Message& msg);

    /// Suffix of the history the peer has not been sent yet, if any.
    /// Throws ProtocolError for a peer without a cursor.
    std::optional<Message> make_increment(SiteId peer);

private:
    PeerCursor& cursor(SiteId peer);
    std::vector<Outgoing> integrate(SiteId from, Patch remote);
    std::vector<Outgoing> broadcast();
    void check_alive() const;

    SiteId id_;
    Kind kind_;
    State base_;
    State current_;
    Patch history_;
    std::set<OpId> history_uids_;
    std::uint64_t next_seq_ = 0;
    std::map<SiteId, PeerCursor> peers_;
    bool faulted_ = false;
    std::string fault_reason_;
};

/// True iff nothing is in flight and, for every ready link a->b among
/// `sites`, a has sent its whole history and b has received all of it.
bool quiescent(const std::vector<const Site*>& sites, std::size_t inflight);

}  // namespace ccr
