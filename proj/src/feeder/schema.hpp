#pragma once

#include <optional>
#include <string_view>

#include "mphase/feeder/parser.hpp"

namespace mphase::detail {

enum class ValueType { real, text, boolean, phases, list, matrix };

std::optional<ElementKind> kind_from_name(std::string_view name);

/// Type of `key` for `kind`, or nullopt if the key is not allowed.
std::optional<ValueType> key_type(ElementKind kind, std::string_view key);

} // namespace mphase::detail
