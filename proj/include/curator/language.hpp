#pragma once

#include <span>
#include <string>
#include <string_view>

namespace curator {

inline constexpr std::string_view kUnknownLanguage = "unknown";

/// The 89 language names accepted as document language tags.
std::span<const std::string_view> supported_languages();

bool is_supported_language(std::string_view tag);

/// Maps a file to a language tag. Extension rules are tried first, then
/// special filenames (Makefile, Dockerfile, CMakeLists.txt). Content is not
/// inspected. Returns "unknown" when nothing matches.
std::string infer_language(std::string_view path, std::string_view content = {});

/// Languages made of prose or markup, exempt from delimiter-balance checks.
bool is_prose_language(std::string_view tag);

}  // namespace curator
