"""Flows, variational equations, equilibria, and omega-limit estimates.

Fixed-step RK4 keeps every run reproducible; the tangent flow shares the
same stages, so the linearization is consistent with the trajectory it
rides on.
"""

import numpy as np

from conedyn import flow, registry

coop = registry.get_system("coop2d")

print("== trajectories ==")
traj = flow.integrate(coop, np.array([0.1, 0.1]), T=50.0, dt=1e-3)
print(f"  coop2d from (0.1, 0.1) reaches {np.round(traj.states[-1], 6)}")

rot = registry.get_system("rotation2d")
loop = flow.integrate(rot, np.array([1.0, 0.0]), T=2 * np.pi, dt=1e-3)
print(f"  rotation2d after one period: {np.round(loop.states[-1], 9)} "
      f"(return error {np.linalg.norm(loop.states[-1] - [1, 0]):.2e})")

print("\n== tangent flow vs finite differences ==")
x0 = np.array([0.4, -0.3])
tf = flow.tangent_flow(coop, x0, T=1.0, dt=1e-3)
h = 1e-5
base = flow.integrate(coop, x0, T=1.0, dt=1e-3).states[-1]
for i in range(2):
    e = np.zeros(2)
    e[i] = h
    plus = flow.integrate(coop, x0 + e, T=1.0, dt=1e-3).states[-1]
    err = np.linalg.norm(tf.phis[-1] @ (e / h) - (plus - base) / h)
    print(f"  column {i}: |Phi e - FD| = {err:.2e}")

print("\n== equilibria from a seed grid ==")
seeds = [np.array([p, q]) for p in np.linspace(-2, 2, 5)
         for q in np.linspace(-2, 2, 5)]
for e in flow.find_equilibria(coop, seeds):
    lam = np.linalg.eigvals(coop.jac(e)).real
    kind = "sink" if lam.max() < 0 else ("source" if lam.min() > 0 else "saddle")
    print(f"  {np.round(e, 6)}  eigenvalues {np.round(np.sort(lam), 3)}  {kind}")

print("\n== omega-limit estimates ==")
for x0, label in ((np.array([1.0, 0.5]), "coop2d (1.0, 0.5)"),
                  (np.array([-0.3, -2.0]), "coop2d (-0.3, -2.0)")):
    est = flow.omega_limit(coop, x0, T=100.0, dt=1e-3)
    print(f"  {label}: {est.kind} at {np.round(est.point, 6)} "
          f"residual {est.residual:.1e}")
est = flow.omega_limit(rot, np.array([1.0, 0.0]), T=100.0, dt=1e-3)
print(f"  rotation2d (1, 0): {est.kind} with {len(est.witnesses)} witness "
      f"points on radius ~{np.linalg.norm(est.witnesses, axis=1).mean():.4f}")
