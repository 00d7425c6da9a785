#include "sdnsim/core.hpp"

#include <cstdio>

namespace sdnsim {

std::string IpAddress::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (value >> 24) & 0xff, (value >> 16) & 0xff,
                  (value >> 8) & 0xff, value & 0xff);
    return buf;
}

std::string flags_str(std::uint8_t flags) {
    std::string s;
    if (flags & kSyn) s += 'S';
    if (flags & kFin) s += 'F';
    if (flags & kRst) s += 'R';
    if (flags & kAck) s += 'A';
    if (s.empty()) s = "-";
    return s;
}

}  // namespace sdnsim
