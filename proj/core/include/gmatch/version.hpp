#pragma once

namespace gmatch {

inline constexpr const char* kVersionTag = "gmatch-0.1.0";
inline constexpr const char* kCheckpointMagic = "GMATCH-CKPT";
inline constexpr int kCheckpointVersion = 1;

}  // namespace gmatch
