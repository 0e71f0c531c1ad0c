#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "smoothforge/assemble.hpp"

namespace smoothforge {

inline constexpr std::string_view kPrefitFormat = "smoothforge-prefit-v1";

/// JSON document tagged "smoothforge-prefit-v1". Dense arrays are stored as
/// {"rows": r, "cols": c, "data": [row-major values]}; vectors as plain lists.
std::string serialize_prefit(const Prefit& prefit);
Prefit deserialize_prefit(std::string_view text);

void save_prefit(const Prefit& prefit, const std::filesystem::path& path);
Prefit load_prefit(const std::filesystem::path& path);

}  // namespace smoothforge
