#pragma once

#include <string>

namespace cvdimer {

/// Fixed 15-significant-digit rendering used by every text output.
std::string fmt15(double v);

}  // namespace cvdimer
