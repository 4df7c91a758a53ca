"""Heat kernel mass and semigroup property on H_Q^1, H_Q^2 and the Cayley plane."""

import argparse

from rank1.ball_geometry import space_descriptor
from rank1.kernels import heat_kernel, heat_kernel_mass, heat_kernel_profile, radial_convolve

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    spaces = [space_descriptor("q", 1), space_descriptor("q", 2), space_descriptor("ca", 2)]
    for sp in spaces:
        masses = ", ".join(f"t={t:g}: {heat_kernel_mass(sp, t):.12f}" for t in (0.1, 0.5, 1.0))
        print(f"{sp.family.value}{sp.m} mass  {masses}")
    for sp in spaces[:2]:
        half = heat_kernel_profile(sp, 0.5)
        for rho0 in (0.0, 0.5, 1.0):
            mc = radial_convolve(sp, half, half, rho0, samples=args.samples, seed=args.seed)
            quad = radial_convolve(sp, half, half, rho0, method="quad")
            ref = float(heat_kernel(sp, 1.0, rho0))
            print(f"{sp.family.value}{sp.m} p_.5*p_.5({rho0}) mc {mc.value:.6e} +- {mc.std_error:.1e}  quad {quad.value:.6e}  p_1 {ref:.6e}")
