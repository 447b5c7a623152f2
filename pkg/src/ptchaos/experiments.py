"""Run configuration, experiment pipelines and result tables."""
from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from math import comb, log
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .entropy import markov_bound, mutual_information, qde, renyi2, ste
from .equilibration import MAX_DIM as EQ_MAX_DIM
from .equilibration import equilibration_report
from .errors import ArgumentError, ResourceError
from .haar import haar_qde, haar_ste, sample_haar_states, ste_regime_violated
from .interventions import KINDS, build_set
from .models import MAX_DENSE_DIM, PRESETS, ModelSpec, build_model
from .ppe import DEFAULT_BINS, build_ensemble, entanglement_stats
from .process import MAX_AMPLITUDES, butterfly_gram, butterfly_marginal, iter_levels
from .sector_basis import MAX_SITES, build_basis, build_split_map, neel_state

SCHEMA_VERSION = 1
EXPERIMENTS = ("qde-scan", "qde-growth", "mutual-info", "ste-growth", "ppe-dist", "ppe-profile",
               "ppe-scaling", "haar-ref", "equilibration")
SECTIONS = ("system", "process", "diagnostics", "sampling", "output")


@dataclass
class RunConfig:
    experiment: str = "qde-growth"
    models: list = field(default_factory=lambda: ["xxz-nnn"])
    L: list = field(default_factory=lambda: [12])
    N: int | None = None  # None means half filling
    n_B: list = field(default_factory=lambda: [8])
    dt: float = 1.75
    dt_grid: list | None = None
    kinds: list = field(default_factory=lambda: ["deterministic"])
    f: float = 0.5
    f_grid: list | None = None
    n_B1: int | None = None
    bins: int = DEFAULT_BINS
    samples: int = 2**14
    seed: int = 0
    t_max: float = 1e4
    out: str | None = None
    workers: int = 1
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        """Build from a possibly sectioned mapping; unknown keys are config errors."""
        flat = {}
        for key, value in (data or {}).items():
            if key in SECTIONS:
                if not isinstance(value, dict):
                    raise ArgumentError(f"section {key!r} must be a mapping")
                flat.update(value)
            else:
                flat[key] = value
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(flat) - names)
        if unknown:
            raise ArgumentError(f"unknown config keys: {', '.join(unknown)}")
        if flat.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ArgumentError(f"unsupported schema_version {flat['schema_version']}")
        return cls(**flat).normalised()

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ArgumentError(f"cannot read config {path}: {exc}") from exc
        if data is not None and not isinstance(data, dict):
            raise ArgumentError("config must be a mapping")
        return cls.from_mapping(data or {})

    def normalised(self) -> "RunConfig":
        def as_list(v):
            return list(v) if isinstance(v, (list, tuple)) else [v]

        self.L = [int(x) for x in as_list(self.L)]
        self.n_B = [int(x) for x in as_list(self.n_B)]
        self.kinds = ["deterministic", "projective"] if self.kinds in ("both", ["both"]) else as_list(self.kinds)
        self.models = as_list(self.models)
        if self.dt_grid is not None:
            self.dt_grid = [float(x) for x in as_list(self.dt_grid)]
        if self.f_grid is not None:
            self.f_grid = [float(x) for x in as_list(self.f_grid)]
        self.dt = float(self.dt)
        return self

    def model_specs(self) -> list[tuple[str, ModelSpec]]:
        specs = []
        for m in self.models:
            if isinstance(m, str):
                if m not in PRESETS:
                    raise ArgumentError(f"unknown model preset {m!r}; choose from {sorted(PRESETS)}")
                specs.append((m, PRESETS[m]))
            elif isinstance(m, dict):
                m = dict(m)
                base = m.pop("preset", None)
                name = m.pop("name", base or m.get("family", "custom"))
                try:
                    spec = ModelSpec(**{**(PRESETS[base].to_dict() if base else {}), **m})
                except (TypeError, KeyError) as exc:
                    raise ArgumentError(f"bad model entry {m!r}: {exc}") from exc
                specs.append((name, spec))
            else:
                raise ArgumentError(f"model entries must be names or mappings, got {m!r}")
        return specs

    def echo(self) -> dict:
        d = asdict(self)
        d["models"] = [{"name": n, **s.to_dict()} for n, s in self.model_specs()]
        return d


@dataclass(frozen=True)
class Diagnostic:
    level: str  # info | error
    code: str  # config | resource
    message: str

    def __str__(self):
        return f"{self.level}: {self.message}"


def _grid(cfg: RunConfig) -> list[float]:
    return cfg.dt_grid if cfg.dt_grid is not None else [cfg.dt]


def _cuts(cfg: RunConfig, L: int) -> list[tuple[float, int]]:
    fs = cfg.f_grid if cfg.f_grid is not None else [cfg.f]
    return [(f, int(round(f * L))) for f in fs]


def validate(cfg: RunConfig) -> list[Diagnostic]:
    """Check every field and report guard margins without running anything."""
    out = []

    def err(msg, code="config"):
        out.append(Diagnostic("error", code, msg))

    if cfg.experiment not in EXPERIMENTS:
        err(f"unknown experiment {cfg.experiment!r}")
    try:
        cfg.model_specs()
    except ArgumentError as exc:
        err(str(exc))
    for k in cfg.kinds:
        if k not in KINDS:
            err(f"unknown intervention kind {k!r}")
    if any(t < 0 or not np.isfinite(t) for t in _grid(cfg)):
        err("intervals must be finite and non-negative")
    if any(n < 1 for n in cfg.n_B):
        err("n_B must be >= 1")
    if cfg.bins < 1:
        err("bins must be >= 1")
    if cfg.samples < 1 or (cfg.experiment in ("ppe-dist", "ppe-profile", "ppe-scaling", "haar-ref")
                           and cfg.samples < 100):
        err("samples must be >= 100 for Haar reference ensembles")
    if cfg.workers < 1:
        err("workers must be >= 1")
    if cfg.t_max <= 0:
        err("t_max must be positive")
    if cfg.experiment == "mutual-info":
        for n in cfg.n_B:
            n1 = cfg.n_B1 if cfg.n_B1 is not None else n // 2
            if not 1 <= n1 < n:
                err(f"need 1 <= n_B1 < n_B, got n_B1={n1}, n_B={n}")
    n_max = max(cfg.n_B, default=1)
    for L in cfg.L:
        N = L // 2 if cfg.N is None else cfg.N
        if not (1 <= L <= MAX_SITES and 0 <= N <= L):
            err(f"L={L}, N={N} outside the basis limits (1 <= L <= {MAX_SITES})")
            continue
        dim = comb(L, N)
        if dim > MAX_DENSE_DIM:
            err(f"L={L}: sector dimension {dim} exceeds the dense limit {MAX_DENSE_DIM}", "resource")
            continue
        for f, cut in _cuts(cfg, L):
            if cfg.experiment in ("ste-growth", "ppe-dist", "ppe-profile", "ppe-scaling", "haar-ref") \
                    and not 1 <= cut <= L - 1:
                err(f"cut fraction {f} gives cut {cut} outside [1, {L - 1}] at L={L}")
        amps = 2**n_max * dim
        out.append(Diagnostic("info", "resource",
                              f"L={L}: dim={dim}, outputs 2^{n_max} x {dim} ~ {amps * 16 / 2**30:.3g} GiB, "
                              f"dense dim^2 ~ {dim**2 * 16 / 2**20:.3g} MiB"))
        if amps > MAX_AMPLITUDES and cfg.experiment != "haar-ref":
            err(f"L={L}, n_B={n_max}: {amps} amplitudes exceed {MAX_AMPLITUDES}", "resource")
        if cfg.experiment == "equilibration" and dim > EQ_MAX_DIM:
            err(f"L={L}: equilibrium recursion limited to dim <= {EQ_MAX_DIM}", "resource")
    return out


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, **row):
        self.rows.append([row[c] for c in self.columns])

    @staticmethod
    def _fmt(v) -> str:
        if isinstance(v, (bool, np.bool_)):
            return "1" if v else "0"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return format(float(v), ".15g")
        return str(v)

    def body(self) -> str:
        lines = ["\t".join(self.columns)]
        lines += ["\t".join(self._fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        pre = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in self.meta.items()]
        return "\n".join(pre) + "\n" + self.body()

    def write(self, path) -> None:
        """Atomic write: a partially written table never appears at ``path``."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(self.render())
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise


def read_table(path) -> tuple[dict, list[str], list[list[str]]]:
    meta, rows = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("# "):
                k, v = line[2:].split(": ", 1)
                meta[k] = json.loads(v)
            else:
                rows.append(line.rstrip("\n").split("\t"))
    return meta, rows[0], rows[1:]


def _systems(cfg: RunConfig):
    """Yield (name, model, psi) per (model, L), building each basis once."""
    for L in cfg.L:
        basis = build_basis(L, L // 2 if cfg.N is None else cfg.N)
        psi = neel_state(basis)
        for name, spec in cfg.model_specs():
            yield name, build_model(spec, basis), psi


def _caps(n_B, dim, d_S=2):
    return n_B * log(d_S), log(dim)


def run_qde_scan(cfg, table):
    targets = set(cfg.n_B)
    for name, model, psi in _systems(cfg):
        for kind in cfg.kinds:
            iset = build_set(kind, model.spec.family)
            for dt in _grid(cfg):
                for out in iter_levels(model, psi, iset, max(targets), dt, cfg.workers):
                    if out.n_B in targets:
                        s = float(qde(out))
                        cap_b, cap_r = _caps(out.n_B, model.dim)
                        table.add(model=name, L=model.basis.L, kind=kind, dt=dt, n_B=out.n_B, qde=s,
                                  qde_bits=s / log(2), haar_qde=haar_qde(out.n_B), max_B=cap_b, max_R=cap_r)


def run_qde_growth(cfg, table):
    cfg = _replace(cfg, n_B=list(range(1, max(cfg.n_B) + 1)))
    run_qde_scan(cfg, table)


def _replace(cfg, **kw):
    return RunConfig(**{**asdict(cfg), **kw})


def run_mutual_info(cfg, table):
    for name, model, psi in _systems(cfg):
        for kind in cfg.kinds:
            iset = build_set(kind, model.spec.family)
            for n_B in cfg.n_B:
                n1 = cfg.n_B1 if cfg.n_B1 is not None else n_B // 2
                for dt in _grid(cfg):
                    out = None
                    for out in iter_levels(model, psi, iset, n_B, dt, cfg.workers):
                        pass
                    bf = butterfly_gram(out)
                    s_full = float(qde(bf))
                    s_b1 = float(qde(butterfly_marginal(bf, range(n1))))
                    mi = float(mutual_information(bf, n1))
                    bound = float(markov_bound(s_full, s_b1, n_B, n1, n_B - n1))
                    table.add(model=name, L=model.basis.L, kind=kind, dt=dt, n_B=n_B, n_B1=n1, mi=mi,
                              bound=bound, qde=s_full, qde_B1=s_b1)


def run_ste_growth(cfg, table):
    n_max = max(cfg.n_B)
    for name, model, psi in _systems(cfg):
        L = model.basis.L
        splits = [(f, build_split_map(model.basis, cut)) for f, cut in _cuts(cfg, L)]
        for kind in cfg.kinds:
            iset = build_set(kind, model.spec.family)
            for dt in _grid(cfg):
                for out in iter_levels(model, psi, iset, n_max, dt, cfg.workers):
                    s_qde = float(qde(out))
                    for f, split in splits:
                        table.add(model=name, L=L, kind=kind, dt=dt, n_B=out.n_B, f=f, cut=split.cut,
                                  ste=float(ste(out, split)), qde=s_qde, haar_ste=haar_ste(out.n_B, 2, 2**split.cut),
                                  haar_valid=not ste_regime_violated(L, split.cut, out.n_B))


def _final(model, psi, iset, n_B, dt, workers):
    out = None
    for out in iter_levels(model, psi, iset, n_B, dt, workers):
        pass
    return out


def run_ppe_dist(cfg, table):
    n_B = max(cfg.n_B)
    haar_done = set()
    for name, model, psi in _systems(cfg):
        L = model.basis.L
        for f, cut in _cuts(cfg, L):
            split = build_split_map(model.basis, cut)
            entries = []
            for kind in cfg.kinds:
                out = _final(model, psi, build_set(kind, model.spec.family), n_B, cfg.dt, cfg.workers)
                entries.append((name, kind, entanglement_stats(build_ensemble(out), split, cfg.bins)))
            if (L, cut) not in haar_done:
                haar_done.add((L, cut))
                entries.append(("haar", "haar", sample_haar_states(model.basis, cut, cfg.samples, cfg.seed, cfg.bins)))
            for source, kind, st in entries:
                for lo, hi, dens in zip(st.edges[:-1], st.edges[1:], st.density):
                    table.add(source=source, kind=kind, L=L, n_B=n_B, dt=cfg.dt, f=f, bin_lo=lo, bin_hi=hi,
                              density=dens, mean=st.mean, std=st.std)


def _stats_rows(cfg, table, n_B_of_L):
    haar = {}
    for name, model, psi in _systems(cfg):
        L = model.basis.L
        n_B = n_B_of_L(L)
        for f, cut in _cuts(cfg, L):
            split = build_split_map(model.basis, cut)
            if (L, cut) not in haar:
                haar[L, cut] = sample_haar_states(model.basis, cut, cfg.samples, cfg.seed, cfg.bins)
            h = haar[L, cut]
            for kind in cfg.kinds:
                out = _final(model, psi, build_set(kind, model.spec.family), n_B, cfg.dt, cfg.workers)
                st = entanglement_stats(build_ensemble(out), split, cfg.bins)
                table.add(model=name, kind=kind, L=L, n_B=n_B, dt=cfg.dt, f=f, cut=cut, mean=st.mean,
                          std=st.std, trajectories=st.sample_count, haar_mean=h.mean, haar_std=h.std)


def run_ppe_stats(cfg, table):
    """Mean and spread per (model, L, f, kind); profile sweeps f, scaling sweeps L."""
    _stats_rows(cfg, table, lambda L: max(cfg.n_B))


def run_haar_ref(cfg, table):
    for L in cfg.L:
        basis = build_basis(L, L // 2 if cfg.N is None else cfg.N)
        for f, cut in _cuts(cfg, L):
            st = sample_haar_states(basis, cut, cfg.samples, cfg.seed, cfg.bins)
            for n_B in cfg.n_B:
                table.add(L=L, dim=basis.dim, f=f, cut=cut, n_B=n_B, haar_qde=haar_qde(n_B),
                          qde_cap=min(haar_qde(n_B), log(basis.dim)), haar_ste=haar_ste(n_B, 2, 2**cut),
                          ste_valid=not ste_regime_violated(L, cut, n_B), state_mean=st.mean, state_std=st.std,
                          samples=cfg.samples, seed=cfg.seed)


def run_equilibration(cfg, table):
    for name, model, psi in _systems(cfg):
        for kind in cfg.kinds:
            iset = build_set(kind, model.spec.family)
            for n_B in cfg.n_B:
                rep = equilibration_report(model, psi, iset, n_B, cfg.samples, cfg.t_max, cfg.seed, cfg.workers)
                table.add(model=name, L=model.basis.L, kind=kind, n_B=n_B, d_eff=rep.d_eff, mean_D=rep.mean_D,
                          D_bound=rep.distance_bound, mean_dS=rep.mean_gap, dS_bound=rep.entropy_bound,
                          threshold=rep.threshold, exceedance=rep.exceedance, p_cap=rep.probability_cap,
                          omega_qde=float(renyi2(rep.omega.gram)), omega_error=rep.omega_error,
                          haar_qde=haar_qde(n_B), samples=cfg.samples)


PIPELINES = {
    "qde-scan": (run_qde_scan, ["model", "L", "kind", "dt", "n_B", "qde", "qde_bits", "haar_qde", "max_B", "max_R"]),
    "qde-growth": (run_qde_growth, ["model", "L", "kind", "dt", "n_B", "qde", "qde_bits", "haar_qde", "max_B",
                                    "max_R"]),
    "mutual-info": (run_mutual_info, ["model", "L", "kind", "dt", "n_B", "n_B1", "mi", "bound", "qde", "qde_B1"]),
    "ste-growth": (run_ste_growth, ["model", "L", "kind", "dt", "n_B", "f", "cut", "ste", "qde", "haar_ste",
                                    "haar_valid"]),
    "ppe-dist": (run_ppe_dist, ["source", "kind", "L", "n_B", "dt", "f", "bin_lo", "bin_hi", "density", "mean",
                                "std"]),
    "ppe-profile": (run_ppe_stats, ["model", "kind", "L", "n_B", "dt", "f", "cut", "mean", "std",
                                      "trajectories", "haar_mean", "haar_std"]),
    "ppe-scaling": (run_ppe_stats, ["model", "kind", "L", "n_B", "dt", "f", "cut", "mean", "std",
                                      "trajectories", "haar_mean", "haar_std"]),
    "haar-ref": (run_haar_ref, ["L", "dim", "f", "cut", "n_B", "haar_qde", "qde_cap", "haar_ste", "ste_valid",
                                "state_mean", "state_std", "samples", "seed"]),
    "equilibration": (run_equilibration, ["model", "L", "kind", "n_B", "d_eff", "mean_D", "D_bound", "mean_dS",
                                          "dS_bound", "threshold", "exceedance", "p_cap", "omega_qde",
                                          "omega_error", "haar_qde", "samples"]),
}


def run(cfg: RunConfig) -> ResultTable:
    """Validate, run the pipeline and, when ``cfg.out`` is set, write the table atomically."""
    problems = [d for d in validate(cfg) if d.level == "error"]
    if problems:
        msg = "; ".join(d.message for d in problems)
        if all(d.code == "resource" for d in problems):
            raise ResourceError(msg)
        raise ArgumentError(msg)
    fn, columns = PIPELINES[cfg.experiment]
    table = ResultTable(columns)
    start = time.perf_counter()
    fn(cfg, table)
    table.meta = {
        "experiment": cfg.experiment,
        "config": cfg.echo(),
        "version": __version__,
        "seed": cfg.seed,
        "units": "nats",
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    if cfg.out:
        table.write(cfg.out)
    return table
