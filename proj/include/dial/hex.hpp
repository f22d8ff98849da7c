/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dial {

using Bytes = std::vector<std::uint8_t>;

/// Lowercase hex, no separators.
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Accepts either case; nullopt on odd length or a non-hex digit.
std::optional<Bytes> from_hex(std::string_view text);

}  // namespace dial
