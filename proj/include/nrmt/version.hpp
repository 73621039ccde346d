#pragma once

namespace nrmt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nrmt
