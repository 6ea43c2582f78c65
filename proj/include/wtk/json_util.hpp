// json_util.hpp
#pragma once

#include <cstdint>
#include <string>

#include "wtk/error.hpp"

namespace wtk::detail {

/// j.at(key) as a non-negative integer. nlohmann converts -1 to a huge
/// unsigned value without complaint, so check the sign first.
template <typename Json>
std::uint64_t get_uint(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.template get<std::uint64_t>();
  if (v.is_number_integer() && v.template get<std::int64_t>() >= 0) return v.template get<std::uint64_t>();
  throw Error(ErrorCode::MalformedRecord, std::string("'") + key + "' must be a non-negative integer");
}

}  // namespace wtk::detail
