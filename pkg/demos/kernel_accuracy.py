"""Accuracy map of the erfcx kernel.

Sweeps the complex plane region by region (series / rational / continued
fraction) and reports worst-case relative error against an
extended-precision reference (needs mpmath, part of the test extra).
"""

import numpy as np

from bolostat import erfcx, faddeeva_w

try:
    import mpmath as mp
except ImportError:
    raise SystemExit("this demo compares against mpmath: pip install mpmath")

mp.mp.dps = 30


def ref(z):
    z = mp.mpc(z)
    return complex(mp.exp(z * z) * mp.erfc(z))


rng = np.random.default_rng(0)
regions = {
    "series (|iz| <= 2.5)": (0.0, 2.5),
    "rational (2.5 < |iz| < 6)": (2.5, 6.0),
    "continued fraction (|iz| >= 6)": (6.0, 30.0),
}

print("erfcx(z) vs 30-digit reference, 400 random points per region")
for name, (rmin, rmax) in regions.items():
    radius = np.sqrt(rng.uniform(max(rmin, 1e-3) ** 2, rmax**2, 400))
    angle = rng.uniform(-np.pi, np.pi, 400)
    zeta = radius * np.exp(1j * angle)  # Faddeeva-plane radius
    z = -1j * zeta  # back to erfcx argument
    # stay clear of the reflection overflow corner
    z = z[np.abs(z.real**2 - z.imag**2) < 700]
    worst = max(abs(erfcx(p) - ref(p)) / abs(ref(p)) for p in z)
    print(f"  {name:32s} worst rel err {worst:.2e}")

print()
print("spot checks:")
for z in (0.0, 1.0, 100.0, 1j, 3 - 4j, -2 + 5j):
    print(f"  erfcx({z!s:>8}) = {erfcx(z):.12g}")
print(f"  w(i) = erfcx(1) = {faddeeva_w(1j):.12g}")
