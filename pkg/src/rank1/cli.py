"""Command line entry point.

    rank1 spaces info --family q --m 2
    rank1 verify factorization --model damek-ricci --k 3
    rank1 verify funk-hecke --case quaternionic --n 1 --alpha 1.5 --r 0.6 --seed 42
    rank1 kernel bgr --family q --m 2 --gamma 1.5 --rho 0.5:3:0.5 --format csv
    rank1 tabulate volume --family ca --m 2 --rho 1:10:1

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
configuration errors.  ``--config FILE`` reads ``key = value`` lines that
stand for ``--key value``; flags given on the command line win.  The
environment variable RANK1_THREADS bounds the worker count of grid commands.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import ball_geometry as bg
from . import division_algebras as da
from . import funk_hecke as fh
from . import inequalities as iq
from . import kernels as kn
from . import op_algebra as oa
from . import rearrangement as ra
from .specfun import adams_constant

Row = dict[str, Any]


class ConfigError(ValueError):
    """Invalid configuration; maps to exit status 2."""


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1.0)
            if len(parts) != 3:
                raise ValueError
            g = cls(*(float(p) for p in parts))
        except ValueError:
            raise ConfigError(f"grid {text!r} is not start:stop:step") from None
        if g.step <= 0 or g.stop < g.start:
            raise ConfigError(f"grid {text!r} is empty")
        return g

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(n)]


@dataclass
class RunConfig:
    command: str
    target: str
    options: dict[str, Any] = field(default_factory=dict)
    fmt: str = "json"
    output: str | None = None

    def get(self, key: str, default: Any = None) -> Any:
        v = self.options.get(key)
        return default if v is None else v

    def require(self, key: str) -> Any:
        v = self.options.get(key)
        if v is None:
            raise ConfigError(f"--{key.replace('_', '-')} is required for {self.command} {self.target}")
        return v

    def seed(self) -> int:
        s = self.require("seed")
        if not 0 <= s < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        return s

    def space(self) -> bg.SpaceDescriptor:
        try:
            return bg.space_descriptor(self.get("family", "q"), int(self.get("m", 1)))
        except ValueError as e:
            raise ConfigError(str(e)) from None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RANK1_THREADS", "1")))
    except ValueError:
        raise ConfigError("RANK1_THREADS must be an integer") from None


def _grid_map(fn: Callable[[float], Row], values: Sequence[float]) -> list[Row]:
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        return list(ex.map(fn, values))


def _check(name: str, value: float, reference: float, tolerance: float, relative: bool = True, **extra: Any) -> Row:
    abs_err = abs(value - reference)
    rel_err = abs_err / abs(reference) if reference != 0 else math.inf if abs_err else 0.0
    ok = (rel_err if relative else abs_err) <= tolerance
    return {"check": name, "pass": bool(ok), "value": value, "reference": reference, "abs_err": abs_err, "rel_err": rel_err, "tolerance": tolerance, **extra}


def _info(name: str, value: float, **extra: Any) -> Row:
    """A tabulated value with no reference; error fields are null."""
    return {"check": name, "pass": True, "value": value, "reference": None, "abs_err": None, "rel_err": None, "tolerance": None, **extra}


# --- spaces ---------------------------------------------------------------------------


def cmd_spaces(cfg: RunConfig) -> list[Row]:
    if cfg.target != "info":
        raise ConfigError(f"unknown spaces target {cfg.target!r}")
    sp = cfg.space()
    return [{"check": "space", "pass": True, "family": sp.family.value, "m": sp.m, "N": sp.N, "Q": sp.Q, "rho": sp.rho, "spectral_gap": sp.spectral_gap, "abs_err": None, "rel_err": None, "tolerance": None}]


# --- kernels ----------------------------------------------------------------------------


def cmd_kernel(cfg: RunConfig) -> list[Row]:
    sp = cfg.space()
    radii = Grid.parse(cfg.require("rho")).values()
    if cfg.target == "heat":
        t = float(cfg.require("t"))
        return _grid_map(lambda r: _info("heat_kernel", float(kn.heat_kernel(sp, t, r)), t=t, rho=r), radii)
    if cfg.target == "bgr":
        params = kn.BGRParams(sp, float(cfg.get("zeta", 0.0)), float(cfg.require("gamma")))
        return _grid_map(lambda r: _info("bgr_kernel", float(kn.bgr_kernel(params, r)), zeta=params.zeta, gamma=params.gamma, rho=r), radii)
    if cfg.target == "composite":
        g, g2, z = float(cfg.require("gamma")), float(cfg.require("gamma2")), float(cfg.require("zeta"))
        return _grid_map(lambda r: _info("composite_kernel", math.exp(iq.log_composite_kernel(sp, g, g2, z, r)), rho=r), radii)
    raise ConfigError(f"unknown kernel target {cfg.target!r}")


# --- verification -------------------------------------------------------------------------


def _residual_row(res: oa.Residual, mutation: str | None) -> Row:
    ok = res.is_zero if mutation is None else not res.is_zero
    return {"check": res.name, "pass": ok, "residual": res.text, "mutation": mutation, "abs_err": 0 if res.is_zero else None, "rel_err": 0 if res.is_zero else None, "tolerance": 0}


def _factorization(cfg: RunConfig) -> list[Row]:
    model = cfg.get("model", "damek-ricci")
    mut = cfg.get("mutation")
    k, m = int(cfg.get("k", 1)), int(cfg.get("m", 1))
    deg = cfg.get("degree")
    if model == "damek-ricci":
        res = [oa.verify_damek_ricci_factorization(k, backend=cfg.get("backend", "pairing"), mutation=mut)]
    elif model == "ball":
        res = [oa.verify_ball_factorization(m, k, max_degree=deg, mutation=mut)]
    elif model == "conjugation":
        res = [oa.verify_lemma_3_1(mutation=mut), oa.verify_beta_identity(mutation=mut and "constant")]
    elif model == "square":
        res = [oa.verify_lemma_3_2(mutation=mut)]
    elif model == "product":
        res = [oa.verify_lemma_3_3(k, identity=int(cfg.get("identity", 1)), mutation=mut)]
    elif model == "geller":
        res = [oa.verify_geller_intertwining(m, max_degree=deg or 4, mutation=mut)]
    elif model == "commutators":
        rep = oa.verify_commutators(m, max_degree=deg, mutation=mut)
        res = [rep.euler_commutator, rep.gamma_commutes, rep.weight_identity]
        if mut is not None:
            # a mutation only targets one of the three identities
            target = rep.euler_commutator if mut == "unit_factor" else rep.weight_identity
            return [_residual_row(target, mut)]
    elif model == "weighted-laplacian":
        res = [oa.verify_lemma_6_1(m, max_degree=deg, mutation=mut)]
    else:
        raise ConfigError(f"unknown factorization model {model!r}")
    return [_residual_row(r, mut) for r in res]


def _funk_hecke(cfg: RunConfig) -> list[Row]:
    case = cfg.get("case", "quaternionic")
    alpha, r = float(cfg.require("alpha")), float(cfg.require("r"))
    method = cfg.get("method", "mc")
    if case == "quaternionic":
        n = int(cfg.get("n", 1))
        closed = fh.poisson_eigen_q(alpha, r, n)
        dim = 4 * n + 3

        def integrand(x: np.ndarray) -> np.ndarray:
            return (1 - 2 * r * x[:, 0] + r * r * np.sum(x[:, :4] ** 2, axis=1)) ** (-alpha)

        quad = lambda: fh.eigenvalue_quaternionic(fh.BisphericalIndex(0, 0), n, fh.ZonalKernel.poisson(alpha, r))  # noqa: E731
    elif case == "octonionic":
        closed = fh.poisson_eigen_ca(alpha, r)
        dim = 15
        z = np.zeros(16)
        z[0] = r

        def integrand(x: np.ndarray) -> np.ndarray:
            return da.psi_ca(z, x) ** (-alpha)

        quad = lambda: fh.eigenvalue_octonionic(fh.BisphericalIndex(0, 0), fh.ZonalKernel.poisson(alpha, r))  # noqa: E731
    else:
        raise ConfigError(f"unknown case {case!r}")
    if method == "quad":
        return [_check(f"funk-hecke {case} quad", quad(), closed, float(cfg.get("tolerance", 1e-6)), alpha=alpha, r=r)]
    if method != "mc":
        raise ConfigError(f"unknown method {method!r}")
    samples = int(cfg.get("samples", 1_000_000))
    val, se = fh.mc_zonal_integral(dim, integrand, samples=samples, seed=cfg.seed())
    row = _check(f"funk-hecke {case} mc", val, closed, 3 * se, relative=False, alpha=alpha, r=r, std_error=se, samples=samples)
    return [row]


def cmd_verify(cfg: RunConfig) -> list[Row]:
    t = cfg.target
    if t == "factorization":
        return _factorization(cfg)
    if t == "funk-hecke":
        return _funk_hecke(cfg)
    if t == "heat-mass":
        sp = cfg.space()
        return _grid_map(lambda tt: _check("heat_kernel_mass", kn.heat_kernel_mass(sp, tt), 1.0, float(cfg.get("tolerance", 1e-3)), t=tt), Grid.parse(cfg.get("t", "0.1:1:0.45")).values())
    if t == "hypertrig":
        beta = float(cfg.require("beta"))

        def one(rho: float) -> Row:
            closed, quad = kn.hypertrig_integral(beta, rho)
            return _check("hypertrig", quad, closed, float(cfg.get("tolerance", 1e-8)), beta=beta, rho=rho)

        return _grid_map(one, Grid.parse(cfg.require("rho")).values())
    if t == "minorant":
        k, a = int(cfg.require("k")), float(cfg.require("a"))
        res = iq.minorant_delta(k, a)
        return [{"check": "minorant", "pass": res.certify() and (res.delta is None or res.delta > 0), "k": k, "a": a, "delta": res.delta, "margin": res.margin, "abs_err": None, "rel_err": None, "tolerance": 0}]
    if t == "eigenfunction":
        sp = bg.space_descriptor("q", int(cfg.get("m", 2)))
        rng = np.random.default_rng(cfg.seed())
        rows = []
        sigma = bg.sample_sphere(sp.N, rng).reshape(sp.m, 4)
        f = bg.eigenfunction_complex_coords(sp, sigma)
        for i in range(int(cfg.get("points", 20))):
            z = bg.sample_sphere(sp.N, rng) * rng.uniform(0.0, 0.9)
            zc = da.q_to_complex(z.reshape(sp.m, 4))
            val = f(zc)
            lap = bg.laplace_beltrami_q(f, zc)
            rows.append(_check("eigenfunction", lap, -(sp.Q / 2) ** 2 * float(np.real(val)), float(cfg.get("tolerance", 1e-4)), point=i))
        return rows
    if t == "oneil":
        sp = cfg.space()
        rng = np.random.default_rng(cfg.seed())
        rows = []
        for i in range(int(cfg.get("pairs", 5))):
            a1, a2 = rng.uniform(0.5, 2.0, 2)
            w1, w2 = rng.uniform(0.2, 0.8, 2)
            f = bg.RadialProfile(lambda r, a=a1, w=w1: a * np.exp(-r * r / w), decay_rate=math.inf)
            g = bg.RadialProfile(lambda r, a=a2, w=w2: a * np.exp(-r * r / w), decay_rate=math.inf)
            t_grid = ra.volume_table(sp).volume(np.array([0.1, 0.3, 0.6, 1.0, 1.5]))
            rep = ra.oneil_check(sp, f, g, t_grid, samples=int(cfg.get("samples", 50_000)), seed=int(rng.integers(2**63)))
            rows.append({"check": "oneil", "pass": rep.holds, "pair": i, "violations": rep.violations, "margin": rep.margin, "abs_err": None, "rel_err": None, "tolerance": 3})
        return rows
    raise ConfigError(f"unknown verify target {t!r}")


# --- estimates ---------------------------------------------------------------------------------


def cmd_estimate(cfg: RunConfig) -> list[Row]:
    sp = cfg.space()
    if cfg.target == "dual-sobolev":
        params = iq.DualSobolevParams(float(cfg.get("gamma", 1.5)), float(cfg.get("gamma2", 2.0)), float(cfg.get("zeta", 1.0)), float(cfg.get("p", 1.9)))
        method = cfg.get("method", "mc")
        seed = cfg.seed() if method == "mc" else int(cfg.get("seed", 0))
        res = iq.rayleigh_search(sp, params, iq.bump_family(), budget=int(cfg.get("budget", 6)), seed=seed, method=method, samples=int(cfg.get("samples", 100_000)))
        return [_info("dual_sobolev_sup", res.sup_ratio, family=res.family, theta=";".join(repr(v) for v in res.theta), evaluations=res.evaluations)]
    if cfg.target == "adams":
        beta = float(cfg.get("beta", 0.0)) or _adams_beta(sp)
        u = iq.bump_family().member((float(cfg.get("radius", 1.0)), 4.0))
        amps = Grid.parse(cfg.get("amplitude", "0.5:2:0.5")).values()
        return [_info("adams_integral", float(v), beta=beta, amplitude=a) for a, v in zip(amps, iq.adams_divergence_trend(sp, u, beta, amps))]
    if cfg.target == "spectral-gap":
        eps = float(cfg.get("epsilon", 1.0))
        u = bg.RadialProfile(lambda r: np.cosh(r) ** (-(sp.Q / 2 + eps)), decay_rate=sp.Q / 2 + eps)
        return [_info("spectral_gap_form", iq.spectral_gap_probe(sp, u, r_max=40.0 + 20.0 / eps), epsilon=eps)]
    if cfg.target == "rearranged-kernel":
        fit = ra.rearranged_kernel_large_t(sp, float(cfg.get("gamma", 1.5)), float(cfg.get("zeta", 0.0)))
        ref = -0.5 - float(cfg.get("zeta", 0.0)) / sp.Q
        return [_check("rearranged_kernel_exponent", fit.exponent, ref, float(cfg.get("tolerance", 0.05)), coefficient=fit.coefficient, log_power=fit.log_power)]
    raise ConfigError(f"unknown estimate target {cfg.target!r}")


def _adams_beta(sp: bg.SpaceDescriptor) -> float:
    return adams_constant(sp.N / 2, sp.N)


# --- tabulation ----------------------------------------------------------------------------------


def cmd_tabulate(cfg: RunConfig) -> list[Row]:
    if cfg.target == "volume":
        sp = cfg.space()
        vt = ra.volume_table(sp)

        def one(r: float) -> Row:
            ref = bg.log_ball_volume(sp, r)
            return _check("log_ball_volume", float(vt.log_volume(r)), ref, float(cfg.get("tolerance", 1e-10)), rho=r)

        return _grid_map(one, Grid.parse(cfg.require("rho")).values())
    if cfg.target == "phi":
        p = float(cfg.require("p"))
        jp = math.ceil(p)

        def one(t: float) -> Row:
            direct = math.exp(t) - sum(t**j / math.factorial(j) for j in range(jp - 1))
            return _check("phi_p", iq.phi_p(p, t), direct, float(cfg.get("tolerance", 1e-10)), relative=False, p=p, t=t)

        return _grid_map(one, Grid.parse(cfg.require("t")).values())
    if cfg.target == "rearrangement":
        sp = cfg.space()
        params = kn.BGRParams(sp, float(cfg.get("zeta", 0.0)), float(cfg.require("gamma")))
        lts = Grid.parse(cfg.require("log_t")).values()
        vals = ra.rearranged_kernel(sp, params.gamma, params.zeta, np.array(lts))
        return [_info("log_rearranged_kernel", float(v), log_t=lt) for lt, v in zip(lts, vals)]
    raise ConfigError(f"unknown tabulate target {cfg.target!r}")


COMMANDS: dict[str, Callable[[RunConfig], list[Row]]] = {
    "spaces": cmd_spaces,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "estimate": cmd_estimate,
    "tabulate": cmd_tabulate,
}


# --- argument parsing and output -------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rank1", description="Kernels, factorization checks and inequality probes on rank-one spaces.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("target")
    p.add_argument("--config")
    p.add_argument("--format", dest="fmt", choices=["csv", "json"], default="json")
    p.add_argument("--output")
    for name in ("family", "model", "case", "method", "mutation", "backend", "rho", "t", "log-t", "amplitude"):
        p.add_argument(f"--{name}")
    for name in ("m", "k", "n", "identity", "degree", "samples", "points", "pairs", "budget"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--seed", type=int)
    for name in ("alpha", "r", "beta", "gamma", "gamma2", "zeta", "a", "p", "tolerance", "radius", "epsilon"):
        p.add_argument(f"--{name}", type=float)
    return p


def _config_tokens(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh_:
            lines = fh_.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    out: list[str] = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {line!r} is not key = value")
        out += [f"--{key.strip().replace('_', '-')}", value.strip()]
    return out


def parse(argv: Sequence[str]) -> RunConfig:
    parser = _parser()
    argv = list(argv)
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise ConfigError("--config needs a path")
        path = argv[i + 1]
        rest = argv[:i] + argv[i + 2 :]
        head = [a for a in rest[:2]]
        argv = head + _config_tokens(path) + rest[2:]
    ns = parser.parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "target", "config", "fmt", "output")}
    return RunConfig(ns.command, ns.target, opts, ns.fmt, ns.output)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(rows: list[Row], fmt: str) -> str:
    if fmt == "json":
        def clean(v: Any) -> Any:
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            if isinstance(v, np.generic):
                return clean(v.item())
            return v

        return json.dumps([{k: clean(v) for k, v in r.items()} for r in rows], indent=2, ensure_ascii=False) + "\n"
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(keys)
    for r in rows:
        w.writerow([_cell(r.get(k)) for k in keys])
    return buf.getvalue()


def run(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse(argv)
        rows = COMMANDS[cfg.command](cfg)
    except SystemExit as e:  # argparse already printed usage
        return int(e.code or 0) and 2
    except (ConfigError, ValueError, TypeError, NotImplementedError) as e:
        print(f"rank1: error: {e}", file=sys.stderr)
        return 2
    text = render(rows, cfg.fmt)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as out:
            out.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.get("pass", True) for r in rows) else 1


def main() -> None:
    sys.exit(run())


__all__ = ["Grid", "RunConfig", "ConfigError", "parse", "render", "run", "main"]


if __name__ == "__main__":
    main()
