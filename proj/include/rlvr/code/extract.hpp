#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rlvr/math/verify.hpp"

namespace rlvr::code {

/// Body of the last ```<fence_tag> block after the last reasoning terminator.
/// The tag must match exactly (```python3 is not ```python).
std::optional<std::string> extract_code(std::string_view response, std::string_view fence_tag = "python",
                                        TerminatorPolicy policy = TerminatorPolicy::ScanWholeText);

}  // namespace rlvr::code
