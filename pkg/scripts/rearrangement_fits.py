"""Power-law fits of the rearranged kernels and a convolution tail integral on H_Q^2."""

import argparse

from rank1.ball_geometry import space_descriptor
from rank1.rearrangement import (
    equimeasurability_check,
    rearranged_kernel_large_t,
    rearranged_kernel_small_t,
    shipped_profiles,
    small_t_prediction,
    tail_square_integral,
)

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tail", action="store_true", help="also evaluate the tail integral (about a minute)")
    args = ap.parse_args()
    sp = space_descriptor("q", 2)
    for name, f in shipped_profiles().items():
        print(f"{name:12s} equimeasurable and monotone: {equimeasurability_check(sp, f).ok}")
    for zeta in (0.0, 0.5, 1.0):
        fit = rearranged_kernel_large_t(sp, 1.5, zeta)
        print(f"large t, zeta={zeta}: exponent {fit.exponent:.5f} (expect {-0.5 - zeta / sp.Q:.5f}), log power {fit.log_power}")
    fit = rearranged_kernel_small_t(sp, 1.5)
    e, c = small_t_prediction(sp, 1.5)
    print(f"small t: exponent {fit.exponent:.5f} vs {e:.5f}, coefficient {fit.coefficient:.6f} vs {c:.6f}")
    if args.tail:
        print(f"tail integral alpha=0.5 zeta=1 beta=1 from t=1: {tail_square_integral(sp, 0.5, 1.0, 1.0):.6e}")
