#pragma once

#ifndef RESTPROJ_VERSION_STRING
#define RESTPROJ_VERSION_STRING "0.1.0"
#endif

namespace restproj {
inline constexpr const char* RESTPROJ_VERSION = RESTPROJ_VERSION_STRING;
}
