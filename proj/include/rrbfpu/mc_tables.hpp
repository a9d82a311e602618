#pragma once

namespace rrbfpu::detail {

extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

}  // namespace rrbfpu::detail
