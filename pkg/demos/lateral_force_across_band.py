"""Lateral recoil force on an excited atom above a magnetized plasma.

An excited two-level atom with a vertical dipole sits at d = 0.01 c/omega_p
above a plasma biased along y (omega_c = 0.4 omega_p).  The bias makes the
surface plasmons non-reciprocal: for a given frequency inside the band
[omega_-, omega_+] only two propagation angles +-theta0 resonate, and the
atom recoils sideways as it emits into them.

The script sweeps the transition frequency across the band and prints the
exact force next to the quasi-static formula, then flips the bias to show
that the force reverses.  Run time is about fifteen seconds.
"""
import numpy as np

from gyrocp import AtomState, HalfSpaceGeometry, PlasmaMaterial
from gyrocp.force import resonant_force
from gyrocp.qs_force import qs_lateral_force
from gyrocp.spp import band_edges, solve_theta0

mat = PlasmaMaterial(omega_p=1.0, omega_c=0.4, gamma_coll=0.015)
geom = HalfSpaceGeometry(0.01)
lo, hi = band_edges(mat)
print(f"surface-plasmon band: omega_- = {lo:.5f}, omega_+ = {hi:.5f}\n")

print(f"{'omega0':>8} {'theta0/pi':>10} {'F_x exact':>11} {'F_x qs':>10}")
for w0 in np.linspace(lo + 0.02, hi - 0.02, 12):
    atom = AtomState([0, 0, 1e-3], w0)
    th0, _ = solve_theta0(mat.lossless(), w0)
    fx = resonant_force(mat, atom, geom)[0]
    fq = qs_lateral_force(mat.lossless(), atom)[0]
    print(f"{w0:8.4f} {th0 / np.pi:10.4f} {fx:11.5f} {fq:10.5f}")

# Near omega_+ the resonant plasmons travel close to +x and the atom
# recoils towards -x.  Near omega_- they travel close to -x and the push
# is towards +x.  F_x changes sign roughly where theta0 crosses pi/2 and
# the emitted momentum has no x component left.

atom = AtomState([0, 0, 1e-3], 0.65)
f_up = resonant_force(mat, atom, geom)[0]
f_down = resonant_force(mat.flipped(), atom, geom)[0]
print(f"\nomega0 = 0.65: F_x = {f_up:.5f} F0 with the bias along +y, "
      f"{f_down:.5f} F0 along -y")
