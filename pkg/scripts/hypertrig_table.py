"""Closed form vs quadrature for the hypertrigonometric integral on a (beta, rho) grid."""

import itertools

from rank1.kernels import hypertrig_integral

if __name__ == "__main__":
    print(f"{'beta':>6} {'rho':>6} {'closed':>22} {'quad':>22} {'rel err':>10}")
    for beta, rho in itertools.product((1.0, 2.5, 7.0), (0.1, 1.0, 2.0)):
        closed, quad = hypertrig_integral(beta, rho)
        print(f"{beta:6.2f} {rho:6.2f} {closed:22.15e} {quad:22.15e} {abs(quad - closed) / abs(closed):10.2e}")
