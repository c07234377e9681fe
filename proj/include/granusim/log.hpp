#pragma once

#include <iostream>
#include <string_view>

namespace granusim {

// Progress and warnings go to standard error; data never does.
inline void log_info(std::string_view msg) { std::cerr << "granusim: " << msg << '\n'; }
inline void log_warning(std::string_view msg) { std::cerr << "granusim: warning: " << msg << '\n'; }

}  // namespace granusim
