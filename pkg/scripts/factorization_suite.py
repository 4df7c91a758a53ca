"""Run every exact operator identity and its mutation control, with timings."""

import time

from rank1 import op_algebra as oa


def cases():
    yield "first-order identity", oa.verify_lemma_3_1, {}, "q2_shift"
    yield "beta identity", oa.verify_beta_identity, {}, "constant"
    yield "square identity", oa.verify_lemma_3_2, {}, "flip_sign"
    for k in (1, 2, 3, 4):
        for i in (1, 2):
            yield f"product identity {i}, k={k}", lambda mutation=None, k=k, i=i: oa.verify_lemma_3_3(k, identity=i, mutation=mutation), {}, "flip_sign"
        yield f"Damek-Ricci k={k}", lambda mutation=None, k=k: oa.verify_damek_ricci_factorization(k, mutation=mutation), {}, "shift"
    for m in (1, 2):
        yield f"Geller intertwining m={m}", lambda mutation=None, m=m: oa.verify_geller_intertwining(m, mutation=mutation), {}, "constant"
        yield f"weighted Laplacian m={m}", lambda mutation=None, m=m: oa.verify_lemma_6_1(m, mutation=mutation), {}, "gamma_shift"
        for k in (1, 2, 3):
            mut = "imaginary_pairing" if k > 1 else "constant"
            yield f"ball factorization m={m}, k={k}", lambda mutation=None, m=m, k=k: oa.verify_ball_factorization(m, k, mutation=mutation), {}, mut


if __name__ == "__main__":
    start = time.perf_counter()
    for name, fn, kw, mut in cases():
        t0 = time.perf_counter()
        good, bad = fn(**kw), fn(mutation=mut, **kw)
        print(f"{name:34s} residual zero: {good.is_zero!s:5s}  mutation '{mut}' caught: {not bad.is_zero!s:5s}  {time.perf_counter() - t0:6.2f} s")
    for m in (1, 2):
        rep = oa.verify_commutators(m)
        print(f"commutators m={m}: {rep.all_zero}")
    print(f"total {time.perf_counter() - start:.1f} s")
