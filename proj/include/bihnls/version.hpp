#ifndef BIHNLS_VERSION_HPP
#define BIHNLS_VERSION_HPP

#define BIHNLS_VERSION_MAJOR 0
#define BIHNLS_VERSION_MINOR 3
#define BIHNLS_VERSION_PATCH 0
#define BIHNLS_VERSION_STRING "0.3.0"

namespace bihnls {
inline const char* version() { return BIHNLS_VERSION_STRING; }
}

#endif
