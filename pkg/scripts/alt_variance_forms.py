"""Compare alternative closed-form CHU and Ray variance expressions with the delta method.

For CHU the alternative variance is zeta^2 * delta'^2 with

    zeta^2 = theta^2 + H (1 - q) int_0^q s a(s) ds + H^2 q (1 - q) / 2,   H = C (alpha - 1)
    delta'^2 = q^(-(alpha - 1)^2 / alpha) C^((1 - alpha) / alpha)

For Ray the alternative xi^2 is derived for g^(alpha - 1) * FGT(alpha), with g the
mean absolute gap, which is not the Ray index (g/Z)^(1 - alpha) * FGT(alpha).
Both are evaluated here next to the delta-method variance and a Monte Carlo
estimate of n * Var(statistic).

    python scripts/alt_variance_forms.py --model exponential:1 --q 0.5 --alpha 0.5 2
"""

import argparse
import math

import numpy as np

from gpindex.asymptotics import _Adaptive, covariance_matrix, functional_for, kernel_for, limit_law
from gpindex.models import draw_sorted, parse_model_spec
from gpindex.quadrature import integrate_1d
from gpindex.sample import IndexId, closed_form_from_sorted


def fgt(a):
    return IndexId("fgt", alpha=a)


def center(model, Z, a):
    k = kernel_for(fgt(a), model, Z)
    return integrate_1d(lambda s: k.d(k.deficit(s)), 0.0, k.q, 1e-11)


def alternative_chu(model, Z, alpha):
    k = kernel_for(fgt(alpha), model, Z)
    q = k.q
    C = center(model, Z, alpha)
    F = functional_for(k)
    theta2 = _Adaptive(q).bridge_form(F, F) / Z ** 2
    s_a = integrate_1d(lambda s: s * model.quantile_derivative(s), 0.0, q, 1e-11)
    H = C * (alpha - 1)
    zeta2 = theta2 + H * (1 - q) * s_a + H * H * q * (1 - q) / 2
    dprime2 = q ** (-(alpha - 1) ** 2 / alpha) * C ** ((1 - alpha) / alpha)
    return zeta2 * dprime2


def alternative_ray(model, Z, alpha):
    k = kernel_for(fgt(alpha), model, Z)
    q = k.q
    K, C = center(model, Z, 1.0), center(model, Z, alpha)
    base = K * Z / q
    R1 = (alpha - 1) * base ** (alpha - 2) * (-K * Z / q ** 2)
    R2 = (alpha - 1) * base ** (alpha - 2) / q
    A1 = C * R1

    def psi(s):
        return model.quantile_derivative(s) * C * R2 + base ** (alpha - 1) / Z * k.h(s)

    integ = _Adaptive(q, tol=1e-7)
    bridge = integ._bridge_form_nested(psi, psi)
    s_psi = integrate_1d(lambda s: s * psi(s), 0.0, q, 1e-11)
    return bridge + A1 * A1 * q * (1 - q) + 2 * A1 * (1 - q) * s_psi


def derived_gC(model, Z, alpha):
    # delta method for (Z K / h)^(alpha - 1) C over (headcount, FGT(1), FGT(alpha))
    Fs = [functional_for(kernel_for(fgt(a), model, Z)) for a in (0.0, 1.0, alpha)]
    S = covariance_matrix(Fs)
    h = float(model.cdf(Z))
    K, C = center(model, Z, 1.0), center(model, Z, alpha)
    T = (Z * K / h) ** (alpha - 1) * C
    grad = np.array([-(alpha - 1) * T / h, (alpha - 1) * T / K, T / C])
    return float(grad @ S @ grad)


def simulate(model, Z, n, reps, seed, stat):
    vals = np.array([stat(draw_sorted(model, n, np.random.default_rng([seed, r]))) for r in range(1, reps + 1)])
    return n * float(np.var(vals, ddof=1))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--model", default="exponential:1")
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--alpha", nargs="+", type=float, default=[0.5, 2.0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    model = parse_model_spec(args.model)
    Z = float(model.quantile(args.q))
    print(f"model {args.model}, Z={Z:.6g}, q={args.q}; Monte Carlo n={args.n}, reps={args.reps}")
    for a in args.alpha:
        if 0 < a <= 1:
            idx = IndexId("chu", alpha=a)
            derived = limit_law(idx, model, Z).transformed_variance
            mc = simulate(model, Z, args.n, args.reps, args.seed, lambda y: closed_form_from_sorted(idx, y, Z))
            print(f"chu({a:g}):  closed form {alternative_chu(model, Z, a):.6f}  delta method {derived:.6f}  "
                  f"Monte Carlo {mc:.6f}")
        ray = IndexId("ray", alpha=a)
        derived_ray = limit_law(ray, model, Z).variance

        def gC(y, a=a):
            Q = int(np.searchsorted(y, Z))
            g = float(np.mean(Z - y[:Q]))
            return g ** (a - 1) * float(np.sum(((Z - y[:Q]) / Z) ** a)) / y.size

        mc_gC = simulate(model, Z, args.n, args.reps, args.seed, gC)
        mc_ray = simulate(model, Z, args.n, args.reps, args.seed, lambda y: closed_form_from_sorted(ray, y, Z))
        print(f"ray({a:g}):  xi^2 {alternative_ray(model, Z, a):.6f}  "
              f"delta method for g^(a-1) FGT {derived_gC(model, Z, a):.6f}  Monte Carlo {mc_gC:.6f}")
        print(f"           Ray index itself: delta method {derived_ray:.6f}  Monte Carlo {mc_ray:.6f}")


if __name__ == "__main__":
    main()
