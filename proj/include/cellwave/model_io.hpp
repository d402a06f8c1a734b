#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cellwave/network.hpp"

namespace cellwave {

/// Parse the line-oriented `.model` format (see docs/model_format.md).
/// Throws ParseError carrying a 1-based line and column on any syntax or
/// semantic problem.
ReactionNetwork parse_model(std::string_view text);

/// Canonical text; parse_model(serialise_model(n)) == n.
std::string serialise_model(const ReactionNetwork& net);

ReactionNetwork load_model_file(const std::filesystem::path& path);

}  // namespace cellwave
