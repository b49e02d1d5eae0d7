#pragma once

#include <string>
#include <string_view>

namespace topicbench {

/// Porter suffix-stripping stemmer, following the reference C
/// implementation (including its "bli" -> "ble" and "logi" -> "log" rules).
/// Input is expected to be lowercase ASCII letters; other words pass
/// through the rules unchanged where no suffix matches.
std::string porter_stem(std::string_view word);

} // namespace topicbench
