#!/usr/bin/env python3
"""Independent oracle for the shape-derivative matrices dN_k of the four-mode swimmer.

The exterior Stokes fields of the modes are built symbolically (sympy) from
Lamb's decaying solution, so no part of the C++ solver is reused. The
boundary data -grad(u_j) V_k is sampled on a Gauss-Legendre x uniform grid
and only its degree-one content is needed for the force and torque.

Usage:
  coupling_derivative_oracle.py            print the matrices
  coupling_derivative_oracle.py --write F  freeze them into JSON file F
  coupling_derivative_oracle.py --check F  compare against a frozen file
"""

import argparse
import json
import sys

import numpy as np
import sympy as sp
from numpy.polynomial.legendre import leggauss

x, y, z, t = sp.symbols("x y z t", real=True)
X = sp.Matrix([x, y, z])
r2 = x**2 + y**2 + z**2
rho = sp.sqrt(r2)


def solid_harmonic(n, m):
    """rho^n Y_nm as a polynomial (orthonormal, Condon-Shortley phase, m >= 0)."""
    norm = sp.sqrt(sp.Rational(2 * n + 1) / (4 * sp.pi) * sp.factorial(n - m) / sp.factorial(n + m))
    dP = sp.Poly(sp.expand(sp.diff(sp.legendre(n, t), t, m)), t)
    poly = 0
    for (k,), c in dP.terms():
        poly += c * z**k * r2 ** ((n - m - k) // 2)
    return sp.expand(norm * (-1) ** m * (x + sp.I * y) ** m * poly)


def lamb_velocity(n, R):
    """Decaying Stokes velocity whose trace on rho = 1 is R(x) x."""
    p = sp.Rational(n * (2 * n - 1), n + 1)
    alpha = sp.Rational(n - 2, 2 * n * (2 * n - 1))
    beta = sp.Rational(n + 1, n * (2 * n - 1))
    S = R * rho ** (-(2 * n + 1))
    grad = lambda f: sp.Matrix([sp.diff(f, v) for v in (x, y, z)])
    return alpha * p * grad(S) - alpha * r2 * grad(p * S) + beta * p * S * X


def modes():
    re = lambda e: sp.expand(sp.re(e))
    im = lambda e: sp.expand(sp.im(e))
    return [(3, re(solid_harmonic(3, 1))), (3, im(solid_harmonic(3, 1))),
            (3, re(solid_harmonic(3, 2))), (4, re(solid_harmonic(4, 2)))]


def grid(L=24):
    g, w = leggauss((L + 2) // 2)
    na = 2 * L + 1
    az = 2 * np.pi * np.arange(na) / na
    pts, wts = [], []
    for ct, wt in zip(g, w):
        st = np.sqrt(1 - ct * ct)
        for a in az:
            pts.append([st * np.cos(a), st * np.sin(a), ct])
            wts.append(wt * 2 * np.pi / na)
    return np.array(pts), np.array(wts)


def wrench(f, pts, wts):
    """(torque, force) of the decaying solution with boundary data f."""
    fr = (f * pts).sum(1)
    a = 3 / (4 * np.pi) * (wts[:, None] * fr[:, None] * pts).sum(0)
    b = 3 / (8 * np.pi) * (wts[:, None] * (f - pts * fr[:, None])).sum(0)
    c = np.array([3 / (8 * np.pi) * (wts * (np.cross(pts, np.eye(3)[i]) * f).sum(1)).sum() for i in range(3)])
    p1 = (a + 2 * b) / 2
    return np.concatenate([-8 * np.pi * c, 4 * np.pi * p1])


def compute():
    pts, wts = grid()
    ms = modes()
    lam = lambda e: sp.lambdify((x, y, z), e, "numpy")
    jac = [lam(lamb_velocity(n, R).jacobian(X)) for n, R in ms]
    field = [lam(R * X) for _, R in ms]
    ev = lambda f, p: np.array(f(*p), dtype=float)
    out = []
    for k in range(len(ms)):
        D = np.zeros((6, len(ms)))
        for j in range(len(ms)):
            data = np.array([-ev(jac[j], p).reshape(3, 3) @ ev(field[k], p).reshape(3) for p in pts])
            D[:, j] = wrench(data, pts, wts)
        out.append(D)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write")
    ap.add_argument("--check")
    args = ap.parse_args()
    mats = compute()
    if args.write:
        with open(args.write, "w") as fh:
            json.dump({"dN": [m.tolist() for m in mats]}, fh, indent=1)
            fh.write("\n")
    if args.check:
        with open(args.check) as fh:
            frozen = [np.array(m) for m in json.load(fh)["dN"]]
        err = max(np.abs(a - b).max() for a, b in zip(mats, frozen))
        print(f"max deviation from frozen values: {err:.3e}")
        return 0 if err < 1e-10 else 1
    if not args.write:
        np.set_printoptions(precision=10, suppress=True, linewidth=160)
        for k, m in enumerate(mats):
            print(f"dN{k + 1}")
            print(m)
    return 0


if __name__ == "__main__":
    sys.exit(main())
