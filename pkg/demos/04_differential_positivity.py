"""Positivity checkers: sampled cone invariance and the flat-space tests.

Three flavors of the same question (does the tangent flow respect the
cone field?) at different price points: check_dp integrates tangent
flows, cross_positivity_flat only looks at the Jacobian on the facets,
and flat_equivalence cross-checks the verdict against order preservation
of the nonlinear flow itself.
"""

import numpy as np

from conedyn import positivity, registry
from conedyn.conefield import ConstantField, HomogeneousPSDField
from conedyn.cones import Orthant

orthant2 = ConstantField(Orthant(2))

print("== check_dp over the registry ==")
for name in ("coop2d", "metzler_linear", "rotation2d"):
    s = registry.get_system(name)
    v = positivity.check_dp(s, orthant2, x_samples=50, ray_samples=8,
                            times=[0.1, 1.0, 5.0], seed=0)
    extra = (f"boundary margin {v.boundary_margin:.2e}"
             if v.boundary_margin is not None else "")
    print(f"  {name:15s} -> {v.status:12s} worst margin {v.worst_margin:+.3e} {extra}")

s = registry.get_system("spd_lyapunov")
v = positivity.check_dp(s, HomogeneousPSDField(2), x_samples=30,
                        ray_samples=8, times=[0.1, 1.0, 5.0], seed=0)
print(f"  {'spd_lyapunov':15s} -> {v.status:12s} worst margin {v.worst_margin:+.3e} "
      f"(rank-one rays stay on the boundary: no strict positivity)")

print("\n== infinitesimal cross-positivity on facets ==")
coop = registry.get_system("coop2d")
v = positivity.cross_positivity_flat(coop, Orthant(2), x_samples=1000, seed=0)
print(f"  coop2d: {v.status}, worst facet derivative {v.worst_margin:+.4f}")

print("\n== positivity == monotonicity on flat space ==")
for name, T in (("metzler_linear", 1.0), ("rotation2d", 4.0)):
    s = registry.get_system(name)
    rep = positivity.flat_equivalence(s, Orthant(2), pairs=200, T=T, seed=0)
    print(f"  {name:15s}: dp={rep['dp_status']:10s} ordered pairs "
          f"{rep['pairs_ordered']}/{rep['pairs']}  agreement {rep['agreement']}")
