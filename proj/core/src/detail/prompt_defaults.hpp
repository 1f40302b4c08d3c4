#pragma once

#include <string_view>

namespace explcorpus::detail {

// Defined in the generated prompt_defaults.cpp.
std::string_view default_prompt_section(std::string_view name);

}  // namespace explcorpus::detail
