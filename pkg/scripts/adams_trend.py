"""Growth of the Adams functional for scaled bumps at the Euclidean critical constant.

Amplitudes are chosen so that beta * A^2 * max u^2 runs from 2 to 40.
"""

import math

from rank1.ball_geometry import space_descriptor
from rank1.inequalities import adams_divergence_trend, bump_family
from rank1.specfun import adams_constant

if __name__ == "__main__":
    levels = [2.0, 5.0, 10.0, 20.0, 40.0]
    u = bump_family().member((1.0, 4.0))
    peak = float(u(0.0))
    for fam, m in (("q", 1), ("q", 2), ("ca", 2)):
        sp = space_descriptor(fam, m)
        beta = adams_constant(sp.N / 2, sp.N)
        amps = [math.sqrt(s / beta) / peak for s in levels]
        vals = adams_divergence_trend(sp, u, beta, amps)
        print(f"{fam}{m} beta={beta:.6g}: " + ", ".join(f"{s:g}: {v:.4e}" for s, v in zip(levels, vals)))
