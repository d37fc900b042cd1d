#pragma once

#include <string>
#include <vector>

namespace kgrag {

// Degradation notes collected while processing one question.
using Warnings = std::vector<std::string>;

} // namespace kgrag
