#include "ccr/repl.hpp"

#include <charconv>

#include "ccr/codec.hpp"
#include "ccr/errors.hpp"

namespace ccr {
namespace {

struct Token {
    std::string text;
    std::size_t column = 0;  // 1-based
    bool quoted = false;
};

std::vector<Token> tokenize(std::string_view line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\n') {
            ++i;
            continue;
        }
        Token t;
        t.column = i + 1;
        if (line[i] == '"') {
            t.quoted = true;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                const char c = line[i++];
                if (c == '"') {
                    closed = true;
                    break;
                }
                if (c != '\\') {
                    t.text += c;
                    continue;
                }
                if (i == line.size()) break;
                switch (const char e = line[i++]) {
                case '"': t.text += '"'; break;
                case '\\': t.text += '\\'; break;
                case 'n': t.text += '\n'; break;
                case 't': t.text += '\t'; break;
                default: throw ParseError(std::string("unknown escape \\") + e, i - 1);
                }
            }
            if (!closed) throw ParseError("unterminated string", t.column);
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
                   line[i] != '\n')
                t.text += line[i++];
        }
        out.push_back(std::move(t));
    }
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::size_t end_column)
        : tokens_(std::move(tokens)), end_column_(end_column)
    {
    }

    bool done() const { return pos_ == tokens_.size(); }
    const Token& peek() const { return tokens_[pos_]; }

    const Token& next(const char* what)
    {
        if (done()) throw ParseError(std::string("expected ") + what, end_column_);
        return tokens_[pos_++];
    }

    std::string word(const char* what) { return next(what).text; }

    template <class Int>
    Int integer(const char* what)
    {
        const Token& t = next(what);
        Int v{};
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        const auto [ptr, ec] = std::from_chars(b, e, v);
        if (t.quoted || ec != std::errc{} || ptr != e || t.text.empty())
            throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.column);
        return v;
    }

    BigInt big(const char* what)
    {
        const Token& t = next(what);
        std::string_view digits = t.text;
        if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
        const bool ok = !t.quoted && !digits.empty() &&
                        digits.find_first_not_of("0123456789") == std::string_view::npos;
        if (!ok) throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.column);
        return BigInt(t.text[0] == '+' ? t.text.substr(1) : t.text);
    }

    void finish()
    {
        if (!done()) {
            const Token& t = tokens_[pos_];
            throw ParseError("unexpected '" + t.text + "'", t.column);
        }
    }

    Intent intent(const Kind& kind);

private:
    Intent post();

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t end_column_;
};

Intent Parser::post()
{
    const Token& verb = next("post command");
    auto at = [](std::size_t i, Intent in) { return Intent{intent::At{i, std::move(in)}}; };
    if (verb.text == "write") return at(0, intent::Write{word("text")});
    if (verb.text == "comment") return at(1, intent::SetAdd{word("comment")});
    if (verb.text == "uncomment") return at(1, intent::SetRem{word("comment")});
    if (verb.text == "like") return at(2, intent::Incr{1});
    if (verb.text == "dislike") return at(3, intent::Incr{1});
    throw ParseError("unknown post command '" + verb.text + "'", verb.column);
}

Intent Parser::intent(const Kind& kind)
{
    const Token& verb = next("command");
    const std::string& v = verb.text;
    switch (kind.tag) {
    case KindTag::counter:
        if (v == "incr") return intent::Incr{integer<std::int64_t>("integer")};
        if (v == "decr") return intent::Decr{integer<std::int64_t>("integer")};
        break;
    case KindTag::addmult:
        if (v == "add") return intent::Add{big("integer")};
        if (v == "mult") return intent::Mult{integer<std::int64_t>("integer")};
        break;
    case KindTag::lww:
        if (v == "write") return intent::Write{word("text")};
        break;
    case KindTag::eset:
        if (v == "add") return intent::SetAdd{word("element")};
        if (v == "rem") return intent::SetRem{word("element")};
        break;
    case KindTag::queue:
        if (v == "enq") return intent::Enq{word("item")};
        if (v == "deq") return intent::Deq{};
        break;
    case KindTag::text:
        if (v == "ins") {
            const auto k = integer<std::size_t>("position");
            return intent::Ins{k, word("text")};
        }
        if (v == "del") {
            const auto k = integer<std::size_t>("position");
            return intent::Del{k, integer<std::size_t>("length")};
        }
        break;
    case KindTag::tuple:
        if (v == "at") {
            const Token& idx = tokens_.size() > pos_ ? tokens_[pos_] : verb;
            const auto i = integer<std::size_t>("index");
            if (i >= kind.components.size())
                throw ParseError("index " + std::to_string(i) + " out of arity " +
                                     std::to_string(kind.components.size()),
                                 idx.column);
            return intent::At{i, intent(kind.components[i])};
        }
        break;
    case KindTag::map:
        if (v == "upd") {
            std::string key = word("key");
            return intent::Upd{std::move(key), intent(kind.component(0))};
        }
        if (v == "post" && kind.component(0) == Kind::social_post()) {
            std::string key = word("key");
            return intent::Upd{std::move(key), post()};
        }
        break;
    }
    throw ParseError("unknown command '" + v + "' for " + kind.name(), verb.column);
}

}  // namespace

ReplCommand parse_repl(const Kind& kind, std::string_view line)
{
    std::size_t first = line.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos || line[first] == '#') return {};
    Parser p(tokenize(line), line.size() + 1);
    const std::string verb = p.peek().text;

    ReplCommand cmd;
    using V = ReplCommand::Verb;
    if (verb == "connect" || verb == "disconnect") {
        p.word("command");
        cmd.verb = verb == "connect" ? V::connect : V::disconnect;
        cmd.address = p.word("address");
    } else if (verb == "peers" || verb == "show" || verb == "history" || verb == "quit" ||
               verb == "sync" || verb == "help") {
        p.word("command");
        cmd.verb = verb == "peers"     ? V::peers
                   : verb == "show"    ? V::show
                   : verb == "history" ? V::history
                   : verb == "quit"    ? V::quit
                   : verb == "sync"    ? V::sync
                                       : V::help;
    } else if (verb == "wait") {
        p.word("command");
        const Token& what = p.next("'peers' or 'ops'");
        if (what.text == "peers") cmd.verb = V::wait_peers;
        else if (what.text == "ops") cmd.verb = V::wait_ops;
        else throw ParseError("expected 'peers' or 'ops', got '" + what.text + "'", what.column);
        cmd.count = p.integer<std::uint64_t>("count");
    } else if (verb == "sleep") {
        p.word("command");
        cmd.verb = V::sleep;
        cmd.count = p.integer<std::uint64_t>("milliseconds");
    } else {
        cmd.verb = V::update;
        cmd.intent = p.intent(kind);
    }
    p.finish();
    return cmd;
}

std::string eval_update(Site& site, const Intent& in, std::vector<Outgoing>& out)
{
    try {
        UpdateResult r = site.local_update(in);
        if (!r.op) return "no effect";
        for (auto& o : r.out) out.push_back(std::move(o));
        return "ok " + to_string(r.op->uid);
    } catch (const IntentError& e) {
        return std::string("error: ") + e.what();
    }
}

std::string render_history(const Site& site)
{
    std::string out;
    for (const auto& op : site.history()) {
        out += to_string(op.uid);
        out += ' ';
        out += codec::encode_body(op.body).dump();
        out += '\n';
    }
    return out;
}

std::string repl_help(const Kind& kind)
{
    std::string s =
        "connect ADDR | disconnect ADDR | peers | show | history | quit\n"
        "sync | wait peers N | wait ops N | sleep MS\n";
    switch (kind.tag) {
    case KindTag::counter: s += "incr N | decr N\n"; break;
    case KindTag::addmult: s += "add N | mult N\n"; break;
    case KindTag::lww: s += "write S\n"; break;
    case KindTag::eset: s += "add S | rem S\n"; break;
    case KindTag::queue: s += "enq S | deq\n"; break;
    case KindTag::text: s += "ins K S | del K N\n"; break;
    case KindTag::tuple: s += "at I CMD\n"; break;
    case KindTag::map:
        s += "upd KEY CMD\n";
        if (kind.component(0) == Kind::social_post())
            s += "post KEY write S | comment S | uncomment S | like | dislike\n";
        break;
    }
    return s;
}

}  // namespace ccr
