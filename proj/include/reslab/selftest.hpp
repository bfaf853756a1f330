#pragma once

#include <iosfwd>

namespace reslab::selftest {

// Compares the production Bessel engine against the multiprecision series
// oracle over the published sample set and prints one line per evaluation
// regime with the observed maximum relative error. Returns true when every
// regime meets its tolerance (1e-12, or 1e-9 in the order/argument
// transition zone).
bool run_bessel_selftest(std::ostream& out);

} // namespace reslab::selftest
