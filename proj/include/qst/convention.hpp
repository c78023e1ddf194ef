#ifndef QST_CONVENTION_HPP
#define QST_CONVENTION_HPP

// The convention ledger: every sign and unit choice that output depends on.
// Its hash is written into every artifact so results from different
// conventions can never be mixed silently.

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace qst {

inline constexpr std::string_view kVersion = "1.0.0";

inline constexpr std::string_view kConventionLedger =
    "H=-J*sum(sx.sx+sy.sy+Delta*sz.sz);U=exp(-iHt);hbar=1;sites=1..N;|0>=up;|1>=down\n"
    "eps0=-J*Delta*bonds;one-magnon hop=-2J;isolated magnon=+4J*Delta\n"
    "G(x->x',t)=<x'|U(t)|x> including exp(-i*eps0*t)\n"
    "line G=exp(-i(eps0+4J*Delta)t)*i^(x-x')*J_(x-x')(4Jt)\n"
    "open Delta=0: sine modes; open Delta=1: cosine modes cos(pi*k*(x-1/2)/N)\n"
    "two-magnon psi=e^{i(p1x1+p2x2)}-e^{i*theta}e^{i(p2x1+p1x2)};measure 1/(8pi^2) over full zone\n"
    "bound part via P=2atan(1/q), weight sin^2(P/2)/(2pi)\n"
    "gate V|0>=g|0>+d|1>,V|1>=-conj(d)|0>+conj(g)|1>\n"
    "bare-hopping model: one-magnon G=i^d*J_d(4Jt) with Dirichlet/periodic images, vacuum exp(-i*eps0*t)\n"
    "semi-infinite chain: single wall at site 1, N observed sites, eps0 over N-1 bonds, single-mirror images\n"
    "t=t0 means t0+\n"
    "harper hop=+1,kick=exp(-i*tau*g*cos(2pi*j*eta/N)),U=Hop*Kick\n";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string convention_hash() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(kConventionLedger)));
  return buf;
}

}  // namespace qst

#endif  // QST_CONVENTION_HPP
