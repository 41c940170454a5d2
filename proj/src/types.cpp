#include "socnav/types.hpp"

#include "socnav/errors.hpp"

namespace socnav {

const char* to_string(Mode m)
{
  return m == Mode::Baseline ? "baseline" : "social";
}

Mode mode_from_string(const std::string& s)
{
  if (s == "baseline") return Mode::Baseline;
  if (s == "social") return Mode::Social;
  throw ValidationError("unknown mode '" + s + "' (expected baseline or social)");
}

}  // namespace socnav
