#pragma once

#include <string_view>

namespace questd::ingestion {

/// Shell-style glob over '/'-separated relative paths: `*` and `?` stay within one
/// segment, `**` spans segments and `**/` also matches zero directories.
bool glob_match(std::string_view pattern, std::string_view path);

}  // namespace questd::ingestion
