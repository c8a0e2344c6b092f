#pragma once

namespace fmpp {
inline constexpr const char* kVersion = "0.1.0";
}
