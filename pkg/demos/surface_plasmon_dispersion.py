"""Exact surface-plasmon branches and their short-wavelength limit.

For a lossless biased plasma the surface plasmon frequency depends on the
direction of propagation.  At large k_par every branch flattens onto the
quasi-static resonance omega_theta, and the set of all omega_theta fills
the band [omega_-, omega_+].  Reversing the bias is the same as turning
the propagation direction around.
"""
import numpy as np

from gyrocp import PlasmaMaterial, band_edges, omega_theta, solve_spp_dispersion

mat = PlasmaMaterial(1.0, 0.4, 0.0)
ks = np.geomspace(0.75, 50.0, 9)
thetas = {"0": 0.0, "pi/4": np.pi / 4, "pi/2": np.pi / 2, "pi": np.pi}

branches = {name: solve_spp_dispersion(mat, th, ks) for name, th in thetas.items()}
print("k_par    " + "".join(f"{'theta=' + n:>13}" for n in thetas))
for i, k in enumerate(ks):
    print(f"{k:7.3f}  " + "".join(f"{branches[n][i]:13.6f}" for n in thetas))
print("omega_t  " + "".join(f"{omega_theta(mat, th):13.6f}" for th in thetas.values()))

lo, hi = band_edges(mat)
print(f"\nband: [{lo:.6f}, {hi:.6f}], unbiased resonance {1 / np.sqrt(2):.6f}")

# the plasmon running along +x in a plasma biased along -y is the one
# running along -x with the original bias
w_flip = solve_spp_dispersion(mat.flipped(), 0.0, ks[-3:])
print("bias reversed, theta=0:", np.round(w_flip, 6), " vs theta=pi:", np.round(branches["pi"][-3:], 6))
