#include "ccr/protocol.hpp"

#include "ccr/errors.hpp"

namespace ccr {

Site::Site(SiteId id, Kind kind)
    : id_(id), kind_(std::move(kind)), base_(initial(kind_)), current_(base_)
{
}

const PeerCursor* Site::peer(SiteId id) const
{
    const auto it = peers_.find(id);
    return it == peers_.end() ? nullptr : &it->second;
}

PeerCursor& Site::cursor(SiteId peer)
{
    const auto it = peers_.find(peer);
    if (it == peers_.end())
        throw ProtocolError("site " + std::to_string(id_) + ": no session with site " +
                            std::to_string(peer));
    return it->second;
}

void Site::check_alive() const
{
    if (faulted_) throw FaultError("site " + std::to_string(id_) + " is faulted: " + fault_reason_);
}

Hello Site::connect(SiteId peer)
{
    if (peer == id_) throw ProtocolError("site " + std::to_string(id_) + " cannot connect to itself");
    PeerCursor& c = peers_[peer];
    c.ready = false;
    return Hello{id_, kind_, c.recv_len()};
}

void Site::disconnect(SiteId peer)
{
    const auto it = peers_.find(peer);
    if (it != peers_.end()) it->second.ready = false;
}

std::optional<Message> Site::make_increment(SiteId peer)
{
    PeerCursor& c = cursor(peer);
    if (!c.ready || c.sent_len >= history_.size()) return std::nullopt;
    Increment inc{kind_, id_, c.sent_len,
                  Patch(history_.begin() + static_cast<std::ptrdiff_t>(c.sent_len), history_.end())};
    c.sent_len = history_.size();
    return Message{std::move(inc)};
}

std::vector<Outgoing> Site::broadcast()
{
    std::vector<Outgoing> out;
    for (auto& [peer, c] : peers_) {
        (void)c;
        if (auto m = make_increment(peer)) out.push_back({peer, std::move(*m)});
    }
    return out;
}

UpdateResult Site::local_update(const Intent& in)
{
    check_alive();
    auto op = gen_effective(kind_, current_, in, OpId{id_, next_seq_});
    if (!op) return {};
    apply_op(kind_, current_, *op);
    ++next_seq_;
    history_.push_back(*op);
    history_uids_.insert(op->uid);
    return {std::move(op), broadcast()};
}

std::vector<Outgoing> Site::integrate(SiteId from, Patch remote)
{
    TransformResult r;
    try {
        r = transform_patch(kind_, base_, remote, history_, TransformOptions{.validate = false});
        cursor(from).recv_prefix = std::move(remote);
        if (is_identity(r.left)) return {};
        for (const auto& op : r.left)
            if (history_uids_.count(op.uid))
                throw CompositionError("integration would repeat " + to_string(op.uid));
        apply_patch_in_place(kind_, current_, r.left);
    } catch (const ProtocolError&) {
        throw;
    } catch (const Error& e) {
        faulted_ = true;
        fault_reason_ = e.what();
        throw FaultError("site " + std::to_string(id_) + " faulted integrating from site " +
                         std::to_string(from) + ": " + e.what());
    }
    for (auto& op : r.left) {
        // A restarted site learns its earlier operations back from its peers
        // and must not reissue their uids.
        if (op.uid.site == id_ && op.uid.seq >= next_seq_) next_seq_ = op.uid.seq + 1;
        history_uids_.insert(op.uid);
        history_.push_back(std::move(op));
    }
    return broadcast();
}

std::vector<Outgoing> Site::handle_message(SiteId from, const Message& msg)
{
    check_alive();
    if (const auto* hello = std::get_if<Hello>(&msg.v)) {
        if (hello->kind != kind_)
            throw ProtocolError("site " + std::to_string(from) + " replicates " + hello->kind.name() +
                                ", this site replicates " + kind_.name());
        if (hello->site != from)
            throw ProtocolError("hello from site " + std::to_string(from) + " claims site " +
                                std::to_string(hello->site));
        PeerCursor& c = cursor(from);
        c.ready = true;
        // A peer claiming more than we hold talked to an earlier incarnation
        // of this site; start over and let the prefix check trigger a resync.
        c.sent_len = hello->known_len <= history_.size() ? hello->known_len : 0;
        std::vector<Outgoing> out;
        if (auto m = make_increment(from)) out.push_back({from, std::move(*m)});
        return out;
    }
    if (const auto* inc = std::get_if<Increment>(&msg.v)) {
        if (inc->kind != kind_)
            throw ProtocolError("increment of kind " + inc->kind.name() + " sent to a " +
                                kind_.name() + " site");
        PeerCursor& c = cursor(from);
        if (inc->prefix_len != c.recv_len()) return {{from, Resync{}}};
        Patch remote = c.recv_prefix;
        remote.insert(remote.end(), inc->ops.begin(), inc->ops.end());
        return integrate(from, std::move(remote));
    }
    if (std::holds_alternative<Resync>(msg.v)) {
        PeerCursor& c = cursor(from);
        c.sent_len = history_.size();
        return {{from, Full{id_, history_}}};
    }
    const auto& full = std::get<Full>(msg.v);
    const PeerCursor& c = cursor(from);
    if (full.ops.size() <= c.recv_len()) {
        // Stale copies of the peer's history are prefixes of what we hold. A
        // shorter history that is not a prefix comes from a restarted peer.
        bool prefix = true;
        for (std::size_t i = 0; prefix && i < full.ops.size(); ++i)
            prefix = full.ops[i].uid == c.recv_prefix[i].uid;
        if (prefix) return {};
    }
    return integrate(from, full.ops);
}

bool quiescent(const std::vector<const Site*>& sites, std::size_t inflight)
{
    if (inflight != 0) return false;
    std::map<SiteId, const Site*> by_id;
    for (const Site* s : sites) by_id[s->id()] = s;
    for (const Site* a : sites) {
        for (const auto& [peer_id, c] : a->peers()) {
            if (!c.ready) continue;
            if (c.sent_len != a->history().size()) return false;
            const auto it = by_id.find(peer_id);
            if (it == by_id.end()) continue;
            const PeerCursor* back = it->second->peer(a->id());
            if (!back || back->recv_len() != a->history().size()) return false;
        }
    }
    return true;
}

}  // namespace ccr
