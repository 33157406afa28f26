"""Walk through the two-variable construction with s = (-1/3, 0), gamma = (2, 1), b = 0.3.

Run with ``python3 demos/ks_walkthrough.py``.  Everything printed is computed;
nothing is hard-coded except the input parameters.
"""
import numpy as np

from fqcrystal.constructions import (
    alias_vector,
    build_example1,
    detected_spectrum,
    enumerate_roots_example1,
    fourier_coefficient,
    ks_spec,
    lambda_p0,
    spectrum_coefficient,
    support_bound,
)
from fqcrystal.genericity import is_uniformly_generic
from fqcrystal.rootfind import real_roots_1d

spec = ks_spec()
P = build_example1(spec)
print("Model polynomial Q:", P.Q[0])
print("Frequency matrix M:", [[str(x) for x in row] for row in P.M])

# 1. One equation in two variables: the relevant notion is genericity
# uniformly over small changes of M.
print("\nUniform genericity of Q o rho o M:", is_uniformly_generic(P).verdict)

# 2. The zero lattice of the t = 0 member.
L0 = lambda_p0(spec)
print(f"\nZero lattice of P_0: spacing {L0.B[0, 0]:.6f}, density {L0.delta:.6f}")

# 3. Real roots on [-20, 20), found by two independent routes.
contour = real_roots_1d(P, (-20, 20))
param = np.sort(enumerate_roots_example1(spec, 20, half_open=True).points[:, 0])
xs = np.array([z.real for z, _ in contour])
print(f"\nRoots in [-20, 20): {len(xs)} by the contour route, {len(param)} parametrically")
print(f"  largest |Im| on the contour route: {max(abs(z.imag) for z, _ in contour):.1e}")
print(f"  largest disagreement between routes: {np.abs(xs - param).max():.1e}")
print("  first few:", np.round(xs[:6], 6))

# 4. Fourier coefficients and the spectrum.
print(f"\nF(0) = {fourier_coefficient(spec, [0, 0]).real:.9f}")
labels, freqs, coef = detected_spectrum(spec, 1)
print("Nonzero coefficients with |frequency| <= 1 (label, frequency, value):")
for ell, w, c in zip(labels, freqs[:, 0], coef):
    print(f"  {tuple(int(v) for v in ell)}  {w:+.2f}  {c.real:+.6f}")
print("Labels with all entries >= 1 or all <= -1 give 0, e.g. (1, 1) and (-1, -2):",
      f"{abs(fourier_coefficient(spec, (1, 1))):.1e}, {abs(fourier_coefficient(spec, (-1, -2))):.1e}")
print("b = 0.3 is rational, so labels differing by", alias_vector(spec),
      "share a frequency; the atom at (1, -2).M is the alias sum",
      f"{spectrum_coefficient(spec, (1, -2)).real:.6f}")

for r in (1, 2, 5):
    labels, freqs, coef = detected_spectrum(spec, r)
    print(f"  r = {r}: {len(labels)} nonzero labels (bound {support_bound(spec, r):g})")
