#include "ccr/message.hpp"

#include "ccr/codec.hpp"
#include "ccr/errors.hpp"

namespace ccr {
namespace {

using codec::Json;

std::size_t get_count(const Json& j, const char* name)
{
    const auto it = j.find(name);
    if (it == j.end() || !it->is_number_unsigned())
        throw DecodeError(std::string("field '") + name + "' must be a non-negative integer");
    return it->get<std::size_t>();
}

SiteId get_site(const Json& j, const char* name)
{
    const auto v = get_count(j, name);
    if (v > std::numeric_limits<SiteId>::max()) throw DecodeError("site id out of range");
    return static_cast<SiteId>(v);
}

Kind get_kind(const Json& j)
{
    const auto it = j.find("kind");
    if (it == j.end() || !it->is_string()) throw DecodeError("field 'kind' must be a string");
    try {
        return Kind::parse(it->get<std::string>());
    } catch (const KindError& e) {
        throw DecodeError(e.what());
    }
}

}  // namespace

bool operator==(const Message& a, const Message& b)
{
    if (a.v.index() != b.v.index()) return false;
    if (const auto* x = std::get_if<Increment>(&a.v)) {
        const auto& y = std::get<Increment>(b.v);
        return x->kind == y.kind && x->sender == y.sender && x->prefix_len == y.prefix_len &&
               structurally_equal(x->ops, y.ops);
    }
    if (const auto* x = std::get_if<Hello>(&a.v)) {
        const auto& y = std::get<Hello>(b.v);
        return x->site == y.site && x->kind == y.kind && x->known_len == y.known_len;
    }
    if (const auto* x = std::get_if<Full>(&a.v)) {
        const auto& y = std::get<Full>(b.v);
        return x->sender == y.sender && structurally_equal(x->ops, y.ops);
    }
    return true;
}

std::string encode_message(const Message& m)
{
    Json j = Json::object();
    j["v"] = kProtocolVersion;
    std::visit(
        [&j](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Increment>) {
                j["kind"] = x.kind.name();
                j["sender"] = x.sender;
                j["prefix_len"] = x.prefix_len;
                j["ops"] = codec::encode_patch(x.ops);
            } else if constexpr (std::is_same_v<T, Hello>) {
                j["hello"] = x.site;
                j["kind"] = x.kind.name();
                j["known_len"] = x.known_len;
            } else if constexpr (std::is_same_v<T, Resync>) {
                j["resync"] = true;
            } else {
                j["full"] = codec::encode_patch(x.ops);
                j["sender"] = x.sender;
            }
        },
        m.v);
    return j.dump() + "\n";
}

Message decode_message(const Kind& local_kind, std::string_view line)
{
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::exception& e) {
        throw DecodeError(std::string("malformed message: ") + e.what());
    }
    if (!j.is_object()) throw DecodeError("message must be a JSON object");
    const auto v = j.find("v");
    if (v == j.end() || !v->is_number_integer()) throw DecodeError("message has no protocol version");
    if (v->get<std::int64_t>() != kProtocolVersion)
        throw DecodeError("unsupported protocol version " + std::to_string(v->get<std::int64_t>()));

    try {
        if (j.contains("hello")) return Hello{get_site(j, "hello"), get_kind(j), get_count(j, "known_len")};
        if (j.contains("resync")) return Resync{};
        if (j.contains("full")) return Full{get_site(j, "sender"), codec::decode_patch(local_kind, j["full"])};
        if (j.contains("ops")) {
            Kind kind = get_kind(j);
            if (kind != local_kind)
                throw ProtocolError("kind mismatch: message carries " + kind.name() + ", site holds " +
                                    local_kind.name());
            return Increment{std::move(kind), get_site(j, "sender"), get_count(j, "prefix_len"),
                             codec::decode_patch(local_kind, j["ops"])};
        }
    } catch (const Json::exception& e) {
        throw DecodeError(std::string("malformed message: ") + e.what());
    }
    throw DecodeError("unrecognized message");
}

}  // namespace ccr
