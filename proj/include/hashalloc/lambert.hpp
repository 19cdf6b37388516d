#pragma once

namespace hashalloc {

// Principal branch W0 of the Lambert W function (w e^w = z, w >= -1) for
// z >= -1/e. Halley iteration from a regime-dependent initial guess: the
// branch-point expansion near -1/e, a Taylor start near 0, and the
// log-asymptotic guess ln z - ln ln z for large z. Arguments within one part
// in 1e12 below -1/e are clamped to the branch point.
double lambert_w0(double z);

}  // namespace hashalloc
