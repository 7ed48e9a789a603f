"""A Rydberg atom above an InSb-like plasma, in newtons.

Indium antimonide behaves roughly as a Drude plasma with
omega_p / 2 pi = 4.9 THz and a collision rate of 0.5 THz / 2 pi.  Its
small effective electron mass puts omega_c within reach of omega_p for
laboratory magnetic fields.
Here an excited Rydberg atom (dipole 7900 D) with omega0 = 0.5 omega_p
sits at d = 0.01 c/omega_p, about 0.1 micrometre.

The script converts the normalized forces to SI units for a few bias
values, then follows the total normal force while the atom decays and
the Casimir term takes over.
"""
import numpy as np

from gyrocp import AtomState, HalfSpaceGeometry, PlasmaMaterial, compute_forces, total_force
from gyrocp.units import debye_to_cm, dipole_to_normalized, f0_si, length_unit

wp = 2 * np.pi * 4.9e12
p = debye_to_cm(7900)
d = 0.01
gamma = dipole_to_normalized(p, wp)
f0 = f0_si(p, d * length_unit(wp))
print(f"d = {d * length_unit(wp) * 1e9:.1f} nm, F0 = {f0:.3e} N, normalized dipole {gamma:.3e}\n")

atom = AtomState([0, 0, gamma], 0.5)
geom = HalfSpaceGeometry(d)
print(f"{'omega_c':>8} {'F_x [N]':>12} {'F_z(0) [N]':>12} {'F_C [N]':>12} {'decay [1/s]':>12}")
results = {}
for wc in (0.4, 0.6, 0.8, 1.0):
    fr = compute_forces(PlasmaMaterial(1.0, wc, 0.5 / 4.9), atom, geom)
    results[wc] = fr
    print(f"{wc:8.2f} {fr.f_res[0] * f0:12.3e} {total_force(fr)[2] * f0:12.3e} "
          f"{fr.f_cas[2] * f0:12.3e} {fr.decay * wp:12.3e}")

# Even with this much loss the lateral push survives.  After a few
# lifetimes only the ground-state Casimir attraction is left.
fr = results[0.6]
print("\nomega_c = 0.6, normal force while the atom decays:")
for n_life in (0.0, 0.5, 1.0, 2.0, 5.0):
    t = n_life / fr.decay
    print(f"  t = {n_life:3.1f} lifetimes: F_z = {total_force(fr, t)[2] * f0:10.3e} N")
