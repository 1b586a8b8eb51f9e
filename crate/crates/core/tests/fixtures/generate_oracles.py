"""Reference values for the acceptance tests, computed with mpmath and sympy.

Run from this directory: python3 generate_oracles.py > oracles.json
"""
import itertools
import json

import mpmath
import sympy

mpmath.mp.dps = 40


def cplx(z):
    z = mpmath.mpc(z)
    return [float(z.real), float(z.imag)]


def legendre():
    rows = []
    for lam in ["0.1", "0.2", "0.3", "0.4", "0.5"]:
        l = mpmath.mpf(lam)
        f = mpmath.hyp2f1(0.5, 0.5, 1, l)
        # Integral between the branch points 0 and lambda; on (0, lambda) the
        # radicand x(x-1)(x-lambda) is positive.
        integral = mpmath.quad(lambda x: 1 / mpmath.sqrt(x * (x - 1) * (x - l)), [0, l])
        rows.append({"lambda": float(l), "hyp2f1": float(f), "integral": cplx(integral)})
    for lam in [(0.1, 0.2), (-0.3, 0.1), (0.25, -0.35)]:
        l = mpmath.mpc(*lam)
        rows.append({"lambda_complex": list(lam), "hyp2f1": cplx(mpmath.hyp2f1(0.5, 0.5, 1, l))})
    return rows


def k3():
    n25, n26, n35, n36 = sympy.symbols("n25 n26 n35 n36")
    g = sympy.gamma
    h = sympy.Rational(1, 2)
    expr = (
        g(n25 + n35 + h) * g(n26 + n36 + h) * g(n25 + n26 + h) * g(n35 + n36 + h)
        / (2 * g(h) ** 3 * g(n25 + n35 + n26 + n36 + sympy.Rational(3, 2))
           * g(n25 + 1) * g(n35 + 1) * g(n26 + 1) * g(n36 + 1))
    )
    out = []
    for d in range(5):
        for e in itertools.product(range(d + 1), repeat=4):
            if sum(e) != d:
                continue
            v = sympy.nsimplify(sympy.simplify(expr.subs(dict(zip((n25, n26, n35, n36), e)))))
            assert v.is_rational
            out.append({"entries": list(e), "value": str(v)})
    return out


def legendre_prefactors():
    # u = P^-4 solves u (u - S)^2 = -D / 27 with S = l^2 - l + 1 and
    # D = T^2 - 4 S^3, T = 2 l^3 - 3 l^2 - 3 l + 2.
    u, l = sympy.symbols("u l")
    s = l**2 - l + 1
    t = 2 * l**3 - 3 * l**2 - 3 * l + 2
    poly = sympy.factor(u * (u - s) ** 2 + (t**2 - 4 * s**3) / 27)
    return {"factored": str(poly)}


def conjugate_sum_resultant():
    x, y, z = sympy.symbols("x y z")
    a = (x + 1) * y**2 - x * y + 1
    r = sympy.Poly(sympy.resultant(a, a.subs(y, z - y), y), x, z)
    terms = [[list(m), str(sympy.numer(c)), str(sympy.denom(c))] for m, c in zip(r.monoms(), r.coeffs())]
    return {"variables": ["x", "z"], "terms": terms, "factored": str(sympy.factor(r.as_expr()))}


print(json.dumps({
    "legendre": legendre(),
    "k3_coefficients": k3(),
    "legendre_prefactor_cubic": legendre_prefactors(),
    "conjugate_sum_resultant": conjugate_sum_resultant(),
}, indent=1))
