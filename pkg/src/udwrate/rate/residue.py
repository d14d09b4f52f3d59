"""Residues by the trapezoid rule on a circle."""

import numpy as np


class ResidueError(RuntimeError):
    """Circle quadrature did not converge."""


def residue_at(f, y0, r, n_nodes=16, tol=1e-12, max_nodes=8192):
    """Residue of ``f`` at ``y0`` from ``(1/2 pi i) \\oint f dy`` on ``|y - y0| = r``.

    The trapezoid rule is spectrally accurate for functions analytic in an
    annulus around the circle, so the result covers poles of any order
    (and the sum of residues of any cluster inside the circle).
    ``n_nodes`` is doubled until two estimates agree to ``tol`` relative
    to ``max(|res|, r * mean|f|)``.
    """
    n = int(n_nodes)

    def estimate(n):
        theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        e = np.exp(1j * theta)
        vals = np.asarray(f(y0 + r * e), dtype=complex)
        return r * np.mean(vals * e), r * np.mean(np.abs(vals))

    prev, _ = estimate(n)
    while n < max_nodes:
        n *= 2
        cur, scale = estimate(n)
        if not np.isfinite(cur):
            raise ResidueError(f"non-finite integrand on circle |y - {y0}| = {r}")
        if abs(cur - prev) <= tol * max(abs(cur), scale):
            return cur
        prev = cur
    raise ResidueError(
        f"residue at {y0} unconverged with {n} nodes; last change {abs(cur - prev):.3e}"
    )
