#include "mfl/counting.hpp"

#include <map>
#include <tuple>

#include "mfl/errors.hpp"

namespace mfl::counting {

BigInt binomial_big(long long n, long long k) {
    if (n < 0 || k < 0) throw config_error("binomial_big: negative argument");
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt res = 1;
    for (long long i = 1; i <= k; ++i) {
        res *= n - k + i;
        res /= i; // exact: res is binom(n-k+i, i) after this step
    }
    return res;
}

BigInt factorial_big(int n) {
    if (n < 0) throw config_error("factorial_big: negative argument");
    BigInt res = 1;
    for (int i = 2; i <= n; ++i) res *= i;
    return res;
}

namespace {

BigInt pow_big(const BigInt& base, int exp) {
    BigInt res = 1;
    for (int i = 0; i < exp; ++i) res *= base;
    return res;
}

BigInt pow2(int k) { return pow_big(2, k); }

// Rising factorial p (p+1) ... (p+k-1), with the empty product for k = 0.
BigInt rising_factorial(int p, int k) {
    BigInt res = 1;
    for (int i = 0; i < k; ++i) res *= p + i;
    return res;
}

} // namespace

BigInt raney(long long x, long long t, long long n) {
    if (x < 1 || t < 0) throw config_error("raney: requires x >= 1 and t >= 0");
    if (n < 0) throw config_error("raney: negative n");
    if (n == 0) return 1;
    const long long denom = x + n * t;
    BigInt num = x * binomial_big(denom, n);
    BigInt q = num / denom;
    if (q * denom != num) throw std::runtime_error("raney: non-exact division");
    return q;
}

BigInt catalan(int m, long long n) {
    if (m < 2) throw config_error("catalan: requires m >= 2");
    return raney(1, m, n);
}

BigInt tree_structure_count(int p, int k) {
    if (p < 1 || k < 0) throw config_error("tree_structure_count: requires p >= 1, k >= 0");
    return pow2(k) * raney(2 * p, 3, k);
}

BigInt loop_structure_bound(int p, int k, int l) {
    if (p < 1 || l < 0 || l > k) throw config_error("loop_structure_bound: requires p >= 1, 0 <= l <= k");
    return pow2(k) * binomial_big(k, l) * binomial_big(2 * p + 3 * k, k) *
           pow_big(p + k - l, l);
}

BigInt elementary_term_bound(int p, int k, int l) {
    if (p < 1 || l < 0 || l > k) throw config_error("elementary_term_bound: requires p >= 1, 0 <= l <= k");
    return pow2(k) * binomial_big(k, l) * pow_big(p + k - l, l) * rising_factorial(p, k);
}

BigInt potential_structure_bound(int p, int k, int l, int m) {
    if (p < 1 || l < 0 || m < 0) throw config_error("potential_structure_bound: negative argument");
    if (l + m > k) throw config_error("potential_structure_bound: requires l + m <= k");
    return pow2(k) * binomial_big(k, m) * binomial_big(k, l) *
           binomial_big(2 * p + 3 * k, k) * pow_big(p + k - l - m, l);
}

BigInt count_elementary_terms(int p, int k, int l, int m) {
    if (p < 1 || k < 0) throw config_error("count_elementary_terms: requires p >= 1, k >= 0");
    if (l < 0 || m < 0 || l + m > k) return 0;
    // Memoized over (k,l,m); p is fixed along the recursion.
    std::map<std::tuple<int, int, int>, BigInt> memo;
    auto rec = [&](auto&& self, int kk, int ll, int mm) -> BigInt {
        if (ll < 0 || mm < 0 || ll + mm > kk) return 0;
        if (kk == 0) return 1; // ll == mm == 0 here
        auto key = std::make_tuple(kk, ll, mm);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const long long s = p + kk - ll - mm;
        BigInt res = 0;
        if (s >= 2) res += 2 * (s - 1) * self(self, kk - 1, ll, mm);
        res += (s * (s - 1)) * self(self, kk - 1, ll - 1, mm); // 2 * binom(s,2)
        res += 2 * s * self(self, kk - 1, ll, mm - 1);
        memo.emplace(key, res);
        return res;
    };
    return rec(rec, k, l, m);
}

} // namespace mfl::counting
