"""The cut-and-project pair with tan(theta) = sqrt 2 and c = sqrt 3 / 5.

Enumerates both multisets exactly, checks their density and compares
empirical Fourier-Bohr coefficients with the closed form.
"""
import numpy as np

from fqcrystal.constructions import (
    CutProjectSpec,
    cutproject_fb_closed,
    cutproject_frequency,
    cutproject_multiset,
)
from fqcrystal.measures import DiscreteMeasure, empirical_fourier_bohr

cp = CutProjectSpec.from_tan(np.sqrt(2), np.sqrt(3) / 5)
print(f"theta = {cp.theta:.6f}, sin(theta) = {np.sin(cp.theta):.6f}")

r = 5000.0
t1 = cutproject_multiset(cp, 1, (-r, r))
t2 = cutproject_multiset(cp, 2, (-r, r))
print(f"atoms in (-{r:g}, {r:g}): {len(t1)} in the first set, {len(t2)} in the second")
print(f"joint density {(len(t1) + len(t2)) / (2 * r):.6f}")

mu1 = DiscreteMeasure(t1, np.ones(len(t1)), r)
print("\nlabel     empirical            closed form")
for ell in [(1, 0), (0, 1), (1, 1), (2, 1), (1, -1), (2, 0)]:
    w = cutproject_frequency(cp, ell)
    emp = empirical_fourier_bohr(mu1, w, r)
    ref = cutproject_fb_closed(cp, 1, *ell)
    print(f"{str(ell):8s} {emp.real:+.6f}{emp.imag:+.6f}i   {ref.real:+.6f}{ref.imag:+.6f}i")
print("\nThe label (2, 0) is a genuine zero of the coefficient for the first set.")
