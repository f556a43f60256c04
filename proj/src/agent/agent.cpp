#include "ccr/agent.hpp"

#include <spdlog/spdlog.h>

#include <boost/asio.hpp>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <thread>

#include "ccr/errors.hpp"
#include "ccr/repl.hpp"

namespace ccr {
namespace {

namespace asio = boost::asio;
using asio::ip::tcp;
using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

std::pair<std::string, std::string> split_address(const std::string& addr)
{
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size())
        throw std::invalid_argument("address '" + addr + "' is not HOST:PORT");
    return {addr.substr(0, colon), addr.substr(colon + 1)};
}

class Agent;

class Session : public std::enable_shared_from_this<Session> {
public:
    Session(Agent& agent, tcp::socket sock, std::string address, bool dialed)
        : agent_(agent), sock_(std::move(sock)), address_(std::move(address)), dialed_(dialed)
    {
    }

    void start() { read(); }
    void send(std::string line);
    void close();

    const std::string& address() const { return address_; }
    bool dialed() const { return dialed_; }
    bool open() const { return open_; }
    bool idle() const { return writes_.empty(); }

    std::optional<SiteId> peer;
    bool hello_sent = false;

private:
    void read();
    void write();

    Agent& agent_;
    tcp::socket sock_;
    asio::streambuf buf_;
    std::deque<std::string> writes_;
    std::string address_;
    bool dialed_;
    bool open_ = true;
};

class Agent {
public:
    Agent(const AgentConfig& cfg, std::ostream& out)
        : cfg_(cfg), out_(out), site_(cfg.site, cfg.kind), acceptor_(io_), poll_(io_)
    {
    }

    int run();

    // Called by sessions.
    void on_line(const std::shared_ptr<Session>& s, const std::string& line);
    void on_closed(const std::shared_ptr<Session>& s);
    void touch() { last_traffic_ = Clock::now(); }

private:
    struct Dial {
        std::string address;
        Clock::time_point deadline;
        bool done = false;
    };

    void listen();
    void accept();
    void dial(std::size_t index);
    void retry_dial(std::size_t index);
    void route(std::vector<Outgoing>&& out);
    void send_to(SiteId peer, const Message& msg);
    void bind_peer(const std::shared_ptr<Session>& s, const Hello& hello);
    void input(std::string line);
    void pump();
    bool execute(const ReplCommand& cmd);
    bool satisfied(const ReplCommand& cmd) const;
    void block(const ReplCommand& cmd);
    void poll_blocked();
    void reply(const std::string& text);
    void fault(const std::string& why);
    void shutdown(int code);
    std::string render_peers() const;

    const AgentConfig& cfg_;
    std::ostream& out_;
    Site site_;
    asio::io_context io_;
    tcp::acceptor acceptor_;
    std::vector<std::shared_ptr<Session>> sessions_;
    std::map<SiteId, std::shared_ptr<Session>> by_site_;
    std::map<std::string, SiteId> known_ids_;
    std::vector<Dial> dials_;
    std::deque<std::string> lines_;
    bool input_done_ = false;
    std::optional<ReplCommand> blocked_;
    Clock::time_point blocked_until_;
    asio::steady_timer poll_;
    Clock::time_point last_traffic_ = Clock::now();
    bool stopping_ = false;
    int exit_code_ = exit_code::ok;
};

void Session::read()
{
    asio::async_read_until(sock_, buf_, '\n', [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
        if (!self->open_) return;
        if (ec) {
            if (ec != asio::error::eof) spdlog::debug("{}: read failed: {}", self->address_, ec.message());
            self->close();
            return;
        }
        std::string line(asio::buffers_begin(self->buf_.data()),
                         asio::buffers_begin(self->buf_.data()) + static_cast<std::ptrdiff_t>(n));
        self->buf_.consume(n);
        self->agent_.on_line(self, line);
        if (self->open_) self->read();
    });
}

void Session::send(std::string line)
{
    if (!open_) return;
    writes_.push_back(std::move(line));
    if (writes_.size() == 1) write();
}

void Session::write()
{
    asio::async_write(sock_, asio::buffer(writes_.front()),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                          if (!self->open_) return;
                          if (ec) {
                              spdlog::debug("{}: write failed: {}", self->address_, ec.message());
                              self->close();
                              return;
                          }
                          self->agent_.touch();
                          self->writes_.pop_front();
                          if (!self->writes_.empty()) self->write();
                      });
}

void Session::close()
{
    if (!open_) return;
    open_ = false;
    writes_.clear();
    boost::system::error_code ignored;
    sock_.shutdown(tcp::socket::shutdown_both, ignored);
    sock_.close(ignored);
    agent_.on_closed(shared_from_this());
}

void Agent::listen()
{
    const auto [host, port] = split_address(cfg_.listen);
    tcp::resolver resolver(io_);
    const auto endpoints = resolver.resolve(host, port);
    const tcp::endpoint ep = *endpoints.begin();
    acceptor_.open(ep.protocol());
    acceptor_.set_option(tcp::acceptor::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    const auto bound = acceptor_.local_endpoint();
    spdlog::info("site {} ({}) listening on {}:{}", cfg_.site, cfg_.kind.name(), bound.address().to_string(),
                 bound.port());
}

void Agent::accept()
{
    acceptor_.async_accept([this](boost::system::error_code ec, tcp::socket sock) {
        if (stopping_) return;
        if (!ec) {
            boost::system::error_code ep_ec;
            const auto remote = sock.remote_endpoint(ep_ec);
            const std::string addr =
                ep_ec ? "?" : remote.address().to_string() + ":" + std::to_string(remote.port());
            spdlog::info("accepted {}", addr);
            auto s = std::make_shared<Session>(*this, std::move(sock), addr, false);
            sessions_.push_back(s);
            s->start();
        }
        accept();
    });
}

void Agent::dial(std::size_t index)
{
    const std::string address = dials_[index].address;
    std::string host, port;
    try {
        std::tie(host, port) = split_address(address);
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        dials_[index].done = true;
        return;
    }
    auto resolver = std::make_shared<tcp::resolver>(io_);
    resolver->async_resolve(host, port, [this, index, resolver](boost::system::error_code ec,
                                                                tcp::resolver::results_type results) {
        if (stopping_) return;
        if (ec) {
            retry_dial(index);
            return;
        }
        auto sock = std::make_shared<tcp::socket>(io_);
        asio::async_connect(*sock, results, [this, index, sock](boost::system::error_code ec2, const tcp::endpoint&) {
            if (stopping_) return;
            if (ec2) {
                retry_dial(index);
                return;
            }
            Dial& d = dials_[index];
            d.done = true;
            spdlog::info("connected to {}", d.address);
            auto s = std::make_shared<Session>(*this, std::move(*sock), d.address, true);
            sessions_.push_back(s);
            // The dialer speaks first. Its Hello is exact when this address was
            // seen before; otherwise known_len 0 and the prefix check sorts it out.
            Hello hello{site_.id(), site_.kind(), 0};
            if (const auto it = known_ids_.find(d.address); it != known_ids_.end()) hello = site_.connect(it->second);
            s->hello_sent = true;
            s->send(encode_message(hello));
            s->start();
        });
    });
}

void Agent::retry_dial(std::size_t index)
{
    Dial& d = dials_[index];
    if (Clock::now() >= d.deadline) {
        spdlog::error("could not connect to {}", d.address);
        d.done = true;
        return;
    }
    auto timer = std::make_shared<asio::steady_timer>(io_, milliseconds(100));
    timer->async_wait([this, index, timer](boost::system::error_code) {
        if (!stopping_) dial(index);
    });
}

void Agent::send_to(SiteId peer, const Message& msg)
{
    const auto it = by_site_.find(peer);
    if (it == by_site_.end() || !it->second->open()) {
        spdlog::debug("dropping message for disconnected site {}", peer);
        return;
    }
    if (std::holds_alternative<Resync>(msg.v)) spdlog::info("requesting a resync from site {}", peer);
    else if (const auto* full = std::get_if<Full>(&msg.v))
        spdlog::info("sending full history ({} ops) to site {}", full->ops.size(), peer);
    spdlog::trace("-> {}: {}", peer, encode_message(msg));
    it->second->send(encode_message(msg));
}

void Agent::route(std::vector<Outgoing>&& out)
{
    for (auto& o : out) send_to(o.to, o.msg);
}

void Agent::bind_peer(const std::shared_ptr<Session>& s, const Hello& hello)
{
    if (hello.kind != site_.kind())
        throw ProtocolError("peer replicates " + hello.kind.name() + ", this site replicates " +
                            site_.kind().name());
    if (hello.site == site_.id()) throw ProtocolError("peer claims this site's id " + std::to_string(hello.site));
    if (const auto it = by_site_.find(hello.site); it != by_site_.end() && it->second->open())
        throw ProtocolError("site " + std::to_string(hello.site) + " is already connected");
    s->peer = hello.site;
    by_site_[hello.site] = s;
    if (s->dialed()) known_ids_[s->address()] = hello.site;
    const PeerCursor* c = site_.peer(hello.site);
    if (!s->hello_sent) {
        s->hello_sent = true;
        s->send(encode_message(site_.connect(hello.site)));
    } else if (!c) {
        site_.connect(hello.site);
    }
    spdlog::info("session with site {} via {}", hello.site, s->address());
}

void Agent::on_line(const std::shared_ptr<Session>& s, const std::string& line)
{
    touch();
    if (stopping_) return;
    spdlog::trace("<- {}: {}", s->peer ? std::to_string(*s->peer) : s->address(), line);
    try {
        Message msg = decode_message(site_.kind(), line);
        if (!s->peer) {
            const auto* hello = std::get_if<Hello>(&msg.v);
            if (!hello) throw ProtocolError("expected hello from " + s->address());
            bind_peer(s, *hello);
        }
        route(site_.handle_message(*s->peer, msg));
    } catch (const FaultError& e) {
        fault(e.what());
    } catch (const Error& e) {
        spdlog::error("{}: {}; closing connection", s->address(), e.what());
        s->close();
    }
    if (blocked_) poll_blocked();
}

void Agent::on_closed(const std::shared_ptr<Session>& s)
{
    std::erase(sessions_, s);
    if (s->peer) {
        const auto it = by_site_.find(*s->peer);
        if (it != by_site_.end() && it->second == s) {
            by_site_.erase(it);
            site_.disconnect(*s->peer);
            spdlog::info("site {} disconnected", *s->peer);
        }
    }
}

void Agent::reply(const std::string& text)
{
    out_ << text;
    if (text.empty() || text.back() != '\n') out_ << '\n';
    out_.flush();
}

std::string Agent::render_peers() const
{
    std::string out;
    for (const auto& [id, c] : site_.peers()) {
        const auto it = by_site_.find(id);
        out += "site " + std::to_string(id) + " " + (it != by_site_.end() ? it->second->address() : "-") +
               (c.ready ? " ready" : " idle") + " sent=" + std::to_string(c.sent_len) +
               " recv=" + std::to_string(c.recv_len()) + "\n";
    }
    if (out.empty()) out = "no peers\n";
    return out;
}

bool Agent::satisfied(const ReplCommand& cmd) const
{
    using V = ReplCommand::Verb;
    switch (cmd.verb) {
    case V::sleep: return Clock::now() >= blocked_until_;
    case V::wait_ops: return site_.history().size() >= cmd.count;
    case V::wait_peers: {
        std::size_t ready = 0;
        for (const auto& [id, c] : site_.peers()) ready += c.ready && by_site_.count(id) ? 1 : 0;
        return ready >= cmd.count;
    }
    case V::sync: {
        for (const auto& d : dials_)
            if (!d.done) return false;
        for (const auto& s : sessions_)
            if (!s->peer || !s->idle()) return false;
        for (const auto& [id, c] : site_.peers())
            if (by_site_.count(id) && (!c.ready || c.sent_len != site_.history().size())) return false;
        return Clock::now() - last_traffic_ >= milliseconds(cfg_.sync_quiet_ms);
    }
    default: return true;
    }
}

void Agent::block(const ReplCommand& cmd)
{
    blocked_ = cmd;
    blocked_until_ = Clock::now() + milliseconds(cmd.verb == ReplCommand::Verb::sleep ? cmd.count
                                                                                        : cfg_.wait_timeout_ms);
    poll_blocked();
}

void Agent::poll_blocked()
{
    if (!blocked_ || stopping_) return;
    const bool ok = satisfied(*blocked_);
    if (ok || Clock::now() >= blocked_until_) {
        const auto verb = blocked_->verb;
        blocked_.reset();
        poll_.cancel();
        if (verb == ReplCommand::Verb::sync) reply(ok ? "synced" : "error: sync timed out");
        else if (verb != ReplCommand::Verb::sleep) reply(ok ? "ok" : "error: wait timed out");
        asio::post(io_, [this] { pump(); });
        return;
    }
    poll_.expires_after(milliseconds(20));
    poll_.async_wait([this](boost::system::error_code ec) {
        if (!ec) poll_blocked();
    });
}

bool Agent::execute(const ReplCommand& cmd)
{
    using V = ReplCommand::Verb;
    switch (cmd.verb) {
    case V::nothing: return true;
    case V::update: {
        std::vector<Outgoing> out;
        try {
            reply(eval_update(site_, cmd.intent, out));
        } catch (const FaultError& e) {
            reply(std::string("error: ") + e.what());
            return true;
        }
        route(std::move(out));
        return true;
    }
    case V::connect:
        dials_.push_back({cmd.address, Clock::now() + milliseconds(cfg_.connect_timeout_ms)});
        dial(dials_.size() - 1);
        reply("connecting " + cmd.address);
        return true;
    case V::disconnect: {
        std::vector<std::shared_ptr<Session>> victims;
        for (const auto& s : sessions_)
            if (s->address() == cmd.address || (s->peer && std::to_string(*s->peer) == cmd.address))
                victims.push_back(s);
        for (const auto& s : victims) s->close();
        reply(victims.empty() ? "error: no connection to " + cmd.address : "disconnected " + cmd.address);
        return true;
    }
    case V::peers: reply(render_peers()); return true;
    case V::show: reply(site_.digest()); return true;
    case V::history: reply(render_history(site_)); return true;
    case V::help: reply(repl_help(site_.kind())); return true;
    case V::quit: shutdown(exit_code_); return false;
    case V::sync:
    case V::wait_peers:
    case V::wait_ops:
    case V::sleep: block(cmd); return false;
    }
    return true;
}

void Agent::input(std::string line)
{
    lines_.push_back(std::move(line));
    pump();
}

void Agent::pump()
{
    while (!stopping_ && !blocked_ && !lines_.empty()) {
        const std::string line = std::move(lines_.front());
        lines_.pop_front();
        ReplCommand cmd;
        try {
            cmd = parse_repl(site_.kind(), line);
        } catch (const ParseError& e) {
            reply(std::string("error: ") + e.what());
            continue;
        }
        if (!execute(cmd)) return;
    }
    if (!stopping_ && !blocked_ && lines_.empty() && input_done_) shutdown(exit_code_);
}

void Agent::fault(const std::string& why)
{
    spdlog::critical("{}", why);
    shutdown(exit_code::fault);
}

void Agent::shutdown(int code)
{
    if (stopping_) return;
    stopping_ = true;
    exit_code_ = code;
    boost::system::error_code ignored;
    acceptor_.close(ignored);
    poll_.cancel();
    // Give queued writes a moment to drain before closing the sockets.
    auto timer = std::make_shared<asio::steady_timer>(io_);
    auto deadline = Clock::now() + milliseconds(1000);
    auto step = std::make_shared<std::function<void()>>();
    *step = [this, timer, deadline, step] {
        const bool drained = std::all_of(sessions_.begin(), sessions_.end(), [](const auto& s) { return s->idle(); });
        if (drained || Clock::now() >= deadline) {
            auto all = sessions_;
            for (const auto& s : all) s->close();
            io_.stop();
            *step = nullptr;
            return;
        }
        timer->expires_after(milliseconds(10));
        timer->async_wait([step](boost::system::error_code) {
            if (*step) (*step)();
        });
    };
    asio::post(io_, [step] { (*step)(); });
}

int Agent::run()
{
    try {
        listen();
    } catch (const std::exception& e) {
        spdlog::error("cannot listen on {}: {}", cfg_.listen, e.what());
        return exit_code::config;
    }
    accept();
    for (const auto& addr : cfg_.connect) {
        dials_.push_back({addr, Clock::now() + milliseconds(cfg_.connect_timeout_ms)});
        dial(dials_.size() - 1);
    }

    if (cfg_.script) {
        std::ifstream f(*cfg_.script);
        if (!f) {
            spdlog::error("cannot read script {}", *cfg_.script);
            return exit_code::config;
        }
        for (std::string line; std::getline(f, line);) lines_.push_back(line);
        input_done_ = true;
        asio::post(io_, [this] { pump(); });
    } else {
        // Blocking reads live on their own thread; lines enter the loop as events.
        std::thread([this] {
            for (std::string line; std::getline(std::cin, line);)
                asio::post(io_, [this, line] { input(line); });
            asio::post(io_, [this] {
                input_done_ = true;
                pump();
            });
        }).detach();
    }

    auto guard = asio::make_work_guard(io_);
    io_.run();
    if (site_.faulted()) exit_code_ = exit_code::fault;
    return exit_code_;
}

}  // namespace

int run_agent(const AgentConfig& cfg, std::ostream& out)
{
    Agent agent(cfg, out);
    return agent.run();
}

}  // namespace ccr
