#!/usr/bin/env python3
# Copyright 2026 The allocdp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the frozen reference values used by the C++ unit tests.

Everything is computed at 50 significant digits with mpmath, independently
of the C++ code paths (direct integration, brute-force enumeration, root
finding). Output is `name = value` lines; tests/oracle_values.h holds the
frozen copy.
"""

import itertools

from mpmath import mp, mpf, ncdf, npdf, exp, log, e, cosh, sqrt, quad, inf
from mpmath import binomial

mp.dps = 50


def gaussian_delta(sigma, eps):
  sigma, eps = mpf(sigma), mpf(eps)
  return ncdf(1 / (2 * sigma) - eps * sigma) - exp(eps) * ncdf(
      -1 / (2 * sigma) - eps * sigma)


def gaussian_delta_by_quadrature(sigma, eps):
  sigma, eps = mpf(sigma), mpf(eps)
  lo = mpf(0.5) + eps * sigma * sigma
  f = lambda x: npdf(x, 1, sigma) - exp(eps) * npdf(x, 0, sigma)
  return quad(f, [lo, lo + 40 * sigma, inf])


def gaussian_epsilon(sigma, delta):
  """Bisection on the strictly decreasing profile."""
  lo, hi = mpf(0), mpf(40)
  for _ in range(200):
    mid = (lo + hi) / 2
    if gaussian_delta(sigma, mid) > mpf(delta):
      lo = mid
    else:
      hi = mid
  return (lo + hi) / 2


def poisson_remove_step(sigma, lam, alpha):
  sigma, lam = mpf(sigma), mpf(lam)
  s = sum(
      binomial(alpha, j) * lam**j * (1 - lam)**(alpha - j) *
      exp(j * (j - 1) / (2 * sigma**2)) for j in range(alpha + 1))
  return log(s) / (alpha - 1)


def poisson_add_step(sigma, lam, alpha):
  """(1/(a-1)) ln int Q^a M^(1-a) by direct integration."""
  sigma, lam, alpha = mpf(sigma), mpf(lam), mpf(alpha)
  q = lambda x: npdf(x, 0, sigma)
  m = lambda x: lam * npdf(x, 1, sigma) + (1 - lam) * npdf(x, 0, sigma)
  f = lambda x: q(x)**alpha * m(x)**(1 - alpha)
  val = quad(f, [-inf, -20, -5, 0, 1, 5, inf])
  return log(val) / (alpha - 1)


def alloc_remove_brute(sigma, t, alpha):
  """Sum over all index sequences in [t]^alpha of t^-alpha prod exp."""
  sigma = mpf(sigma)
  total = mpf(0)
  for seq in itertools.product(range(t), repeat=alpha):
    counts = [seq.count(i) for i in range(t)]
    total += exp(sum(c * (c - 1) for c in counts) / (2 * sigma**2))
  return log(total / mpf(t)**alpha) / (alpha - 1)


def main():
  out = {}
  for s, eps in [(1, 0), (1, 1), (1, 0.5), (2, 0.5), (2, 0.625), (1, 30),
                 (0.3, 20), (5, 3)]:
    out[f"gaussian_delta({s},{eps})"] = gaussian_delta(s, eps)
  out["gaussian_delta(1,1)_quadrature"] = gaussian_delta_by_quadrature(1, 1)
  out["one_minus_gaussian_delta(1,-20)"] = 1 - gaussian_delta(1, -20)
  out["log_gaussian_delta(1,50)"] = log(gaussian_delta(1, 50))
  out["gaussian_epsilon(1,1e-6)"] = gaussian_epsilon(1, mpf("1e-6"))
  out["gaussian_epsilon(2,1e-5)"] = gaussian_epsilon(2, mpf("1e-5"))
  out["log_normal_cdf(-40)"] = log(ncdf(-40))
  out["rdp_to_delta(rho=0,alpha=2,eps=10)"] = mpf(0.25) * exp(-10)
  out["rdp_to_epsilon(rho=1,alpha=2,delta=1e-6)"] = (
      1 + log(mpf(10)**6) + log(mpf(0.25)))
  for s, lam, a in [(1, 0.5, 2), (1, 0.1, 3), (2, 0.01, 10), (0.5, 0.2, 4)]:
    out[f"poisson_remove({s},{lam},{a})"] = poisson_remove_step(s, lam, a)
  for s, lam, a in [(1, 0.1, 3), (1, 0.5, 2), (2, 0.01, 10), (0.7, 0.3, 2.5)]:
    out[f"poisson_add({s},{lam},{a})"] = poisson_add_step(s, lam, a)
  out["alloc_remove(1,2,2)"] = log((e + 1) / 2)
  out["alloc_remove(1,1e4,2)"] = log(1 + (e - 1) / 10**4)
  for s, t, a in [(1, 3, 3), (1, 4, 4), (0.8, 3, 5), (2, 5, 3)]:
    out[f"alloc_remove_brute({s},{t},{a})"] = alloc_remove_brute(s, t, a)
  g = 1 / (1 - mpf(0.9)**10)
  out["decomposition_gamma(t=10,lambda=0.1)"] = g
  out["decomposition_eps_remove(t=10,lambda=0.1,eps=1)"] = log(1 + (e - 1) / g)
  t = 10**4
  out["decomposition_gamma(t=1e4)"] = 1 / (1 - (1 - mpf(1) / t)**t)
  out["e_over_e_minus_1"] = e / (e - 1)
  gam = cosh(1) * sqrt(2 * log(mpf(10)**10) / 10**6)
  out["truncated_gamma(eps0=1,delta'=1e-10,t=1e6)"] = gam
  out["truncated_eta(eps0=1,delta'=1e-10,t=1e6)"] = 1 / (10**6 * (1 - gam))
  for k, v in out.items():
    print(f"{k} = {mp.nstr(v, 20)}")


if __name__ == "__main__":
  main()
