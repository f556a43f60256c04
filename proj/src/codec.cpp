#include "ccr/codec.hpp"

#include <limits>

#include "ccr/errors.hpp"
#include "ccr/utf8.hpp"

namespace ccr::codec {
namespace {

[[noreturn]] void bad(const std::string& what) { throw DecodeError(what); }

const Json& field(const Json& j, const char* name)
{
    if (!j.is_object()) bad("expected an object");
    const auto it = j.find(name);
    if (it == j.end()) bad(std::string("missing field '") + name + "'");
    return *it;
}

std::string get_string(const Json& j, const char* name)
{
    const Json& f = field(j, name);
    if (!f.is_string()) bad(std::string("field '") + name + "' must be a string");
    return f.get<std::string>();
}

std::uint64_t get_unsigned(const Json& j, const char* name)
{
    const Json& f = field(j, name);
    if (!f.is_number_unsigned()) bad(std::string("field '") + name + "' must be a non-negative integer");
    return f.get<std::uint64_t>();
}

std::int64_t get_signed(const Json& j, const char* name)
{
    const Json& f = field(j, name);
    if (!f.is_number_integer()) bad(std::string("field '") + name + "' must be an integer");
    return f.get<std::int64_t>();
}

// Values that fit in 64 bits travel as JSON numbers, larger ones as decimal strings.
Json encode_big(const BigInt& v)
{
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return v.str();
}

BigInt decode_big(const Json& j, const char* name)
{
    const Json& f = field(j, name);
    if (f.is_number_integer()) return BigInt(f.get<std::int64_t>());
    if (f.is_string()) {
        try {
            return BigInt(f.get<std::string>());
        } catch (const std::exception&) {
            bad(std::string("field '") + name + "' is not an integer");
        }
    }
    bad(std::string("field '") + name + "' must be an integer");
}

Json typed(const char* type)
{
    Json j = Json::object();
    j["type"] = type;
    return j;
}

}  // namespace

Json encode_uid(const OpId& id)
{
    Json j = Json::object();
    j["site"] = id.site;
    j["seq"] = id.seq;
    return j;
}

OpId decode_uid(const Json& j)
{
    const auto site = get_unsigned(j, "site");
    if (site > std::numeric_limits<SiteId>::max()) bad("site id out of range");
    return OpId{static_cast<SiteId>(site), get_unsigned(j, "seq")};
}

Json encode_body(const Body& body)
{
    return std::visit(
        [](const auto& b) -> Json {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Incr>) {
                Json j = typed("Incr");
                j["n"] = b.n;
                return j;
            } else if constexpr (std::is_same_v<T, Decr>) {
                Json j = typed("Decr");
                j["n"] = b.n;
                return j;
            } else if constexpr (std::is_same_v<T, AddBy>) {
                Json j = typed("Add");
                j["m"] = encode_big(b.m);
                return j;
            } else if constexpr (std::is_same_v<T, MultBy>) {
                Json j = typed("Mult");
                j["n"] = b.n;
                return j;
            } else if constexpr (std::is_same_v<T, WriteExcept>) {
                Json j = typed("WriteExcept");
                j["s"] = b.text;
                Json keep = Json::array();
                for (const auto& id : b.keep) keep.push_back(encode_uid(id));
                j["keep"] = std::move(keep);
                return j;
            } else if constexpr (std::is_same_v<T, SetAdd>) {
                Json j = typed("Add");
                j["x"] = b.elem;
                return j;
            } else if constexpr (std::is_same_v<T, SetRem>) {
                Json j = typed("Rem");
                j["x"] = b.elem;
                return j;
            } else if constexpr (std::is_same_v<T, EnqAt>) {
                Json j = typed("Enq");
                j["k"] = b.k;
                j["x"] = b.item;
                return j;
            } else if constexpr (std::is_same_v<T, Deq>) {
                Json j = typed("Deq");
                j["target"] = encode_uid(b.target);
                return j;
            } else if constexpr (std::is_same_v<T, Ins>) {
                Json j = typed("Ins");
                j["k"] = b.k;
                j["s"] = utf8::encode(b.s);
                return j;
            } else if constexpr (std::is_same_v<T, Del>) {
                Json j = typed("Del");
                Json ranges = Json::array();
                for (const auto& span : b.ranges) ranges.push_back(Json::array({span.start, span.len}));
                j["ranges"] = std::move(ranges);
                return j;
            } else if constexpr (std::is_same_v<T, At>) {
                Json j = typed("At");
                j["i"] = b.index;
                j["op"] = encode_body(*b.inner);
                return j;
            } else {
                Json j = typed("Upd");
                j["key"] = b.key;
                j["patch"] = Json::array({encode_body(*b.inner)});
                return j;
            }
        },
        body.v);
}

Body decode_body(const Kind& kind, const Json& j)
{
    const std::string type = get_string(j, "type");
    const auto unexpected = [&]() -> Body {
        bad("operation type '" + type + "' is not valid for " + kind.name());
    };
    switch (kind.tag) {
    case KindTag::counter:
        if (type == "Incr") return Incr{get_signed(j, "n")};
        if (type == "Decr") return Decr{get_signed(j, "n")};
        return unexpected();
    case KindTag::addmult:
        if (type == "Add") return AddBy{decode_big(j, "m")};
        if (type == "Mult") return MultBy{get_signed(j, "n")};
        return unexpected();
    case KindTag::lww: {
        if (type != "WriteExcept") return unexpected();
        WriteExcept w{get_string(j, "s"), {}};
        const Json& keep = field(j, "keep");
        if (!keep.is_array()) bad("field 'keep' must be an array");
        for (const auto& id : keep) w.keep.insert(decode_uid(id));
        return w;
    }
    case KindTag::eset:
        if (type == "Add") return SetAdd{get_string(j, "x")};
        if (type == "Rem") return SetRem{get_string(j, "x")};
        return unexpected();
    case KindTag::queue:
        if (type == "Enq") return EnqAt{get_unsigned(j, "k"), get_string(j, "x")};
        if (type == "Deq") return Deq{decode_uid(field(j, "target"))};
        return unexpected();
    case KindTag::text:
        if (type == "Ins") return Ins{get_unsigned(j, "k"), utf8::decode(get_string(j, "s"))};
        if (type == "Del") {
            Del d;
            const Json& ranges = field(j, "ranges");
            if (!ranges.is_array() || ranges.empty()) bad("field 'ranges' must be a non-empty array");
            for (const auto& r : ranges) {
                if (!r.is_array() || r.size() != 2 || !r[0].is_number_unsigned() ||
                    !r[1].is_number_unsigned() || r[1].get<std::size_t>() == 0)
                    bad("delete range must be [start, len] with len > 0");
                const Span span{r[0].get<std::size_t>(), r[1].get<std::size_t>()};
                if (!d.ranges.empty() && span.start <= d.ranges.back().end())
                    bad("delete ranges must be sorted and disjoint");
                d.ranges.push_back(span);
            }
            return d;
        }
        return unexpected();
    case KindTag::tuple: {
        if (type != "At") return unexpected();
        const auto index = get_unsigned(j, "i");
        if (index >= kind.components.size()) bad("tuple index out of arity");
        return At{index, decode_body(kind.components[index], field(j, "op"))};
    }
    case KindTag::map: {
        if (type != "Upd") return unexpected();
        const Json& patch = field(j, "patch");
        if (!patch.is_array() || patch.size() != 1) bad("field 'patch' must hold exactly one operation");
        return Upd{get_string(j, "key"), decode_body(kind.component(0), patch[0])};
    }
    }
    return unexpected();
}

Json encode_op(const Operation& op)
{
    Json j = Json::object();
    j["uid"] = encode_uid(op.uid);
    Json body = encode_body(op.body);
    for (auto& [key, value] : body.items()) j[key] = std::move(value);
    return j;
}

Operation decode_op(const Kind& kind, const Json& j)
{
    return Operation{decode_uid(field(j, "uid")), decode_body(kind, j)};
}

Json encode_patch(const Patch& p)
{
    Json j = Json::array();
    for (const auto& op : p) j.push_back(encode_op(op));
    return j;
}

Patch decode_patch(const Kind& kind, const Json& j)
{
    if (!j.is_array()) bad("a patch must be an array");
    Patch p;
    p.reserve(j.size());
    for (const auto& op : j) p.push_back(decode_op(kind, op));
    return p;
}

}  // namespace ccr::codec
