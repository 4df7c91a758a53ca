"""Small- and large-distance behaviour of the Bessel-Green-Riesz kernels on H_Q^2."""

import numpy as np

from rank1.ball_geometry import space_descriptor
from rank1.kernels import BGRParams, bgr_kernel, log_bgr_kernel, small_distance_constant
from rank1.specfun import riesz_constant

if __name__ == "__main__":
    sp = space_descriptor("q", 2)
    gamma = 1.5
    small = np.geomspace(1e-3, 1e-2, 8)
    large = np.linspace(3.0, 8.0, 11)
    ref = 1 / riesz_constant(sp.N, gamma).value
    for zeta in (0.0, 0.5, 1.0):
        params = BGRParams(sp, zeta, gamma)
        e, logc = np.polyfit(np.log(small), np.log(bgr_kernel(params, small)), 1)
        power = gamma - 2 if zeta == 0 else (gamma - 2) / 2
        logk = np.array([log_bgr_kernel(params, r) for r in large])
        raw = np.polyfit(large, logk, 1)[0]
        corrected = np.polyfit(large, logk - power * np.log(large), 1)[0]
        print(f"zeta={zeta:3.1f}  small: exponent {e:.5f} coefficient/ref {np.exp(logc) / ref:.5f}"
              f"  large: slope {raw:.4f}, with rho^{power:g} removed {corrected:.4f} (expect {-(sp.Q / 2 + zeta):g})")
    for m in (1, 2, 3):
        for g in (0.5, 1.5, 2.5):
            a, b = small_distance_constant(m, g)
            print(f"m={m} gamma={g}: assembled {a:.15e} expected {b:.15e}")
