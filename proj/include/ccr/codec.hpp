#pragma once

#include <json.hpp>

#include "ccr/kind.hpp"
#include "ccr/operation.hpp"

namespace ccr::codec {

/// Key order is part of the wire format, so everything is an ordered_json.
using Json = nlohmann::ordered_json;

Json encode_uid(const OpId& id);
OpId decode_uid(const Json& j);

/// {"type":"Ins","k":3,"s":"ab"} and friends; see README for the full table.
Json encode_body(const Body& body);
/// The kind disambiguates shared type names (eset "Add" vs addmult "Add").
Body decode_body(const Kind& kind, const Json& j);

/// {"uid":{"site":0,"seq":3},"type":...,...}
Json encode_op(const Operation& op);
Operation decode_op(const Kind& kind, const Json& j);

Json encode_patch(const Patch& p);
Patch decode_patch(const Kind& kind, const Json& j);

}  // namespace ccr::codec
