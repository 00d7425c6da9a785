#pragma once

#include "sdnsim/core.hpp"

namespace sdnsim {

// Key material for stateless cookie generation; fixed per switch per run.
struct CookieKey {
    std::uint64_t secret_hi = 0;
    std::uint64_t secret_lo = 0;
    std::uint32_t epoch_len_s = 64;  // coarse time-counter granularity
};

// ISN layout: top 3 bits carry the epoch counter mod 8, low 29 bits a keyed
// hash of the flow and the counter. No state is kept between issue and
// validate; that property is what makes the classification handshake immune
// to floods of never-completed SYNs.
std::uint32_t issue_cookie(const CookieKey& key, const FlowKey& flow, SimTime now);

// True iff echoed_isn was issued for this flow under the current or the
// immediately previous time counter value.
bool validate_cookie(const CookieKey& key, const FlowKey& flow, std::uint32_t echoed_isn,
                     SimTime now);

}  // namespace sdnsim
