"""Genericity, unfoldedness and amoeba probes on small examples."""
from fqcrystal import LaurentMap, LaurentPoly, is_unfolded, mixed_volume
from fqcrystal.amoeba import amoeba_contains, is_lee_yang, lee_yang_family, m_stability_probe
from fqcrystal.genericity import is_generic

z1, z2 = LaurentPoly.variable(0, 2), LaurentPoly.variable(1, 2)
square = [(0, 0), (1, 0), (0, 1), (1, 1)]

print("Two unit squares: mixed volume", mixed_volume([square, square]))
print("  unfolded?", is_unfolded([square, square])[0])

good = LaurentMap([1 + 2 * z1 + 3 * z2 + 5 * z1 * z2, 2 + z1 + 7 * z2 + 3 * z1 * z2])
bad = LaurentMap([1 + z1 + z2 + z1 * z2, 2 + z1 + 3 * z2 + z1 * z2])
for name, Q in (("generic pair", good), ("pair with a shared facial root", bad)):
    v = is_generic(Q)
    print(f"\n{name}: {v.verdict}")
    for w in v.witnesses[:2]:
        print(f"  face direction u = {w['u']}, common root {w['root'].round(6)}")

q = 1 + z1 + z2
print("\nAmoeba of 1 + z1 + z2:")
for x in [(0.0, 0.0), (2.0, 2.0), (-3.0, -3.0)]:
    print(f"  {x}: {amoeba_contains(q, x)}")

A = [[0.5, 0.3], [0.3, 0.5]]
f = lee_yang_family(A)
print("\nLee-Yang family polynomial:", f)
print("  verdict:", is_lee_yang(f)[0])

line = z1 - 2 * z2
rep = m_stability_probe(line, [[1.0], [1.0]], delta=0.0)
print(f"\nz1 - 2 z2 along M = (1, 1): {rep.stable}, clearance {rep.min_clearance:.4f}")
