#include "rlvr/code/extract.hpp"

#include <vector>

namespace rlvr::code {

namespace {

constexpr std::string_view kFence = "```";

bool at_line_start(std::string_view s, std::size_t pos) { return pos == 0 || s[pos - 1] == '\n'; }

}  // namespace

std::optional<std::string> extract_code(std::string_view response, std::string_view fence_tag,
                                        TerminatorPolicy policy) {
  const auto start = answer_region_start(response, policy);
  if (!start) return std::nullopt;
  const std::string_view region = response.substr(*start);

  std::optional<std::string> last;
  std::size_t pos = 0;
  while ((pos = region.find(kFence, pos)) != std::string_view::npos) {
    std::size_t info_end = region.find('\n', pos);
    if (info_end == std::string_view::npos) break;
    std::string_view info = region.substr(pos + kFence.size(), info_end - pos - kFence.size());
    while (!info.empty() && (info.back() == ' ' || info.back() == '\r' || info.back() == '\t'))
      info.remove_suffix(1);
    // Find the closing fence: ``` at the start of a line.
    std::size_t close = info_end + 1;
    while ((close = region.find(kFence, close)) != std::string_view::npos &&
           !at_line_start(region, close))
      close += kFence.size();
    if (close == std::string_view::npos) break;
    if (info == fence_tag) {
      std::string body(region.substr(info_end + 1, close - info_end - 1));
      if (!body.empty() && body.back() == '\n') body.pop_back();
      last = std::move(body);
    }
    pos = close + kFence.size();
  }
  return last;
}

}  // namespace rlvr::code
