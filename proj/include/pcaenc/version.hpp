#pragma once

namespace pcaenc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace pcaenc
