"""Search over compactly supported bumps for the dual Sobolev ratio on H_Q^1."""

import argparse

from rank1.ball_geometry import space_descriptor
from rank1.inequalities import DualSobolevParams, bump_family, rayleigh_search

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=8)
    ap.add_argument("--method", choices=["mc", "quad"], default="quad")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sp = space_descriptor("q", 1)
    params = DualSobolevParams(gamma=1.5, gamma2=2.0, zeta=1.0, p=1.9)
    res = rayleigh_search(sp, params, bump_family(), budget=args.budget, seed=args.seed, method=args.method)
    print(f"sup ratio {res.sup_ratio:.6e} at theta {tuple(round(v, 4) for v in res.theta)} after {res.evaluations} evaluations")
