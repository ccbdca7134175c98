#ifndef ADAPID_VERSION_HPP
#define ADAPID_VERSION_HPP

#define ADAPID_VERSION_MAJOR 0
#define ADAPID_VERSION_MINOR 1
#define ADAPID_VERSION_PATCH 0
#define ADAPID_VERSION_STRING "0.1.0"

namespace adapid {
inline const char* version() { return ADAPID_VERSION_STRING; }
}

#endif
