#pragma once

// Exact integer combinatorics for the commutator expansion.
//
// Everything here is big-integer arithmetic; no floating point enters.  The
// central objects are
//   * generalized Raney numbers  A_n(x,t) = x/(x+nt) * binom(x+nt, n),
//   * m-ary Catalan numbers      C_n^m = A_n(1,m),
//   * the exact number of tree structures 2^k * A_k(2p, 3),
//   * upper bounds on loop-structure and elementary-term counts,
//   * the elementary-term recursion count c(p,k,l,m).
//
// c(p,k,l,m) counts the elementary summands of the order-k commutator term
// with l loop contractions and m external-potential vertices: with
// s = p + k - l - m,
//     c(p,k,l,m) = 2(s-1) c(p,k-1,l,m) + 2 binom(s,2) c(p,k-1,l-1,m)
//                  + 2s c(p,k-1,l,m-1),      c(p,0,0,0) = 1.
// Each interaction vertex carries an extra slot-labelling factor 2, so the
// admissible-graph count equals 2^(k-m) * c(p,k,l,m); graph-level tests rely
// on this identity.

#include <boost/multiprecision/cpp_int.hpp>

namespace mfl::counting {

using BigInt = boost::multiprecision::cpp_int;

// Exact binomial coefficient; 0 for k > n, throws for negative arguments.
BigInt binomial_big(long long n, long long k);

BigInt factorial_big(int n);

// Generalized Raney number A_n(x,t).  Requires x >= 1, t >= 0 (so that
// x + n t > 0); the division is checked to be exact.
BigInt raney(long long x, long long t, long long n);

// n'th m-ary Catalan number C_n^m = A_n(1,m) = binom(nm,n) / (n(m-1)+1),
// the number of ordered trees with n vertices and at most m children per
// vertex.  Requires m >= 2.
BigInt catalan(int m, long long n);

// Exact number of tree (l = 0) graph structures:
//     |Q(p,k,0)| = 2^k * 2p/(2p+3k) * binom(2p+3k, k).
// Requires p >= 1, k >= 0.
BigInt tree_structure_count(int p, int k);

// Upper bound on the number of l-loop graph structures:
//     |Q(p,k,l)| <= 2^k * binom(k,l) * binom(2p+3k,k) * (p+k-l)^l.
BigInt loop_structure_bound(int p, int k, int l);

// Upper bound on the number of elementary terms:
//     c(p,k,l) <= 2^k * binom(k,l) * (p+k-l)^l * (p+k-1)...(p+1)p.
BigInt elementary_term_bound(int p, int k, int l);

// Structure-count bound in the external-potential variant (m potential
// vertices out of k):
//     2^k * binom(k,m) * binom(k,l) * binom(2p+3k,k) * (p+k-l-m)^l.
// Requires l + m <= k.
BigInt potential_structure_bound(int p, int k, int l, int m);

// Exact elementary-term count c(p,k,l,m) from the recursion above; m = 0
// recovers the interaction-only expansion.
BigInt count_elementary_terms(int p, int k, int l, int m = 0);

} // namespace mfl::counting
