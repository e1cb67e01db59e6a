#pragma once

#include "maass/hejhal.hpp"

// The first even cusp form, solved once per test binary.
inline const maass::HejhalResult& first_form() {
    static const maass::HejhalResult res = maass::hejhal_solve(13.5, 14.0, 10000);
    return res;
}
