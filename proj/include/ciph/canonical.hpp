#pragma once

#include <json.hpp>

#include "ciph/bytes.hpp"

namespace ciph {

using Json = nlohmann::json;

/// Deterministic byte encoding used by every hash and signature in the
/// system: object keys sorted bytewise ascending, no insignificant
/// whitespace, UTF-8 pass-through, integers in shortest decimal form, and a
/// fixed escape table for strings. Equal documents encode to equal bytes no
/// matter how they were constructed.
///
/// Supported values: objects with string keys, arrays, strings, integers and
/// booleans. Byte strings appear as lowercase hex strings. Floats and null
/// are rejected with UnsupportedValue; floating-point data is always hashed
/// through a fixed-point wire encoding instead.
Bytes canonical_bytes(const Json& doc);

/// SHA-256 over canonical_bytes(doc).
Bytes canonical_digest(const Json& doc);

}  // namespace ciph
