#pragma once

// Symbols shared by the test suites.

#include "tlm/tlm.hpp"

namespace fixtures {

using tlm::cd;
using tlm::Mat;
using tlm::RationalEntry;
using tlm::RationalMatrixFn;

inline tlm::ArfimaSymbol farima(double d) { return tlm::ArfimaSymbol::farima(d); }

inline tlm::ArfimaSymbol white(int q) { return tlm::ArfimaSymbol::white_noise(q); }

// d = 0, g = 1/(1 - 0.5 z).
inline tlm::ArfimaSymbol ar1() {
  return tlm::ArfimaSymbol::make(0.0, RationalMatrixFn::scalar({1.0}, {1.0, -0.5}));
}

// g = 1/(1 - 0.5 z) with fractional order d.
inline tlm::ArfimaSymbol arfima_ar(double d) {
  return tlm::ArfimaSymbol::make(d, RationalMatrixFn::scalar({1.0}, {1.0, -0.5}));
}

// q = 2, g = diag(1/(1 - 0.4 z), 1 + 0.3 z).
inline tlm::ArfimaSymbol diag2(double d) {
  return tlm::ArfimaSymbol::make(d, RationalMatrixFn::diagonal({{{1.0}, {1.0, -0.4}}, {{1.0, 0.3}, {1.0}}}));
}

// Non-commuting complex fixture: g = U D, g_sharp = D U^* with U unitary and
// D = diag(1/(1 - 0.5i z), 1 + 0.3 z). Here w~ != w.
inline tlm::ArfimaSymbol twisted(double d) {
  const double r = 1.0 / std::sqrt(2.0);
  Mat U(2, 2);
  U << cd{r, 0}, cd{0, r}, cd{0, r}, cd{r, 0};
  const RationalEntry D[2] = {{{1.0}, {1.0, cd{0.0, -0.5}}}, {{1.0, 0.3}, {1.0}}};
  std::vector<RationalEntry> g, gs;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      g.push_back({tlm::poly_scale(D[j].num, U(i, j)), D[j].den});
      gs.push_back({tlm::poly_scale(D[i].num, std::conj(U(j, i))), D[i].den});
    }
  return tlm::ArfimaSymbol::make(d, RationalMatrixFn(2, g), RationalMatrixFn(2, gs));
}

}  // namespace fixtures
