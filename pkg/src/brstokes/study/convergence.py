"""Convergence studies over families of meshes."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from ..assembly import DEFAULT_RHS_DEGREE, build_system
from ..errors import SingularSystemError
from ..linsolve import solve
from ..mesh import build_shishkin_mesh, build_uniform_mesh, shishkin_transition
from ..norms import broken_h1_seminorm, error_report, l2_norm
from ..reconstruction import ReconstructionVariant
from .cases import CASES

log = logging.getLogger(__name__)

MESH_FAMILIES = ("uniform", "shishkin")


@dataclass
class StudyConfig:
    epsilon: float = 1e-4
    nu: float = 1e-4
    variant: ReconstructionVariant = ReconstructionVariant.BDM1
    mesh_family: str = "shishkin"
    levels: list = field(default_factory=lambda: [8, 16, 32, 64])
    quad_degree: int = DEFAULT_RHS_DEGREE
    case: str = "boundary-layer"
    out: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        self.variant = ReconstructionVariant.parse(self.variant)
        self.levels = [int(n) for n in self.levels]
        if not self.epsilon > 0 or not self.nu > 0:
            raise ValueError("epsilon and nu must be positive")
        if self.mesh_family not in MESH_FAMILIES:
            raise ValueError(f"mesh family must be one of {MESH_FAMILIES}, got {self.mesh_family!r}")
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; choose from {sorted(CASES)}")
        if not self.levels or any(n < 1 for n in self.levels):
            raise ValueError("levels must be positive integers")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly increasing")
        if self.mesh_family == "shishkin" and any(n % 2 for n in self.levels):
            raise ValueError("Shishkin meshes need even n")
        if self.quad_degree < 4:
            raise ValueError("quad_degree must be at least 4")

    def make_case(self):
        if self.case == "boundary-layer":
            return CASES[self.case](self.epsilon, self.nu)
        return CASES[self.case](self.nu)

    def make_mesh(self, n):
        if self.mesh_family == "uniform":
            return build_uniform_mesh(n)
        return build_shishkin_mesh(n, n, shishkin_transition(self.epsilon))

    def manifest(self):
        d = asdict(self)
        d["variant"] = self.variant.value
        d["tau"] = shishkin_transition(self.epsilon)
        return d


@dataclass
class StudyRecord:
    level: int
    n: int
    dofs: int
    h_max: float
    aspect_ratio: float
    err_u_rel: float
    err_p_rel: float
    err_u: float
    err_p: float
    residual: float
    order_u: Optional[float] = None
    order_p: Optional[float] = None


def observed_order(coarse, fine, ratio=2.0):
    if coarse <= 0 or fine <= 0:
        return math.nan
    return math.log(coarse / fine) / math.log(ratio)


def reference_norms(config: StudyConfig, case=None):
    """Exact-solution norms ``(||u||_{1,h}, ||p||_0)`` integrated on the finest
    mesh of the study; for layer solutions this is always the layer-adapted
    mesh so that uniform and graded families share denominators."""
    case = case or config.make_case()
    n = config.levels[-1]
    if case.has_layer:
        n += n % 2
        mesh = build_shishkin_mesh(n, n, shishkin_transition(case.epsilon))
    else:
        mesh = config.make_mesh(n)
    return broken_h1_seminorm(case.u, mesh=mesh), l2_norm(case.p, mesh=mesh)


def run_level(config: StudyConfig, level: int, norms=None):
    n = config.levels[level]
    case = config.make_case()
    u_norm, p_norm = norms if norms is not None else reference_norms(config, case)
    mesh = config.make_mesh(n)
    system = build_system(mesh, config.nu, case.f, config.variant, g=case.g,
                          quad_degree=config.quad_degree)
    try:
        sol = solve(system)
    except SingularSystemError as exc:
        raise SingularSystemError(exc.pivot, exc.detail, context=f"level {level} (n={n})") from None
    rep = error_report(sol, case.u, case.p, u_norm, p_norm)
    log.info("%s n=%d: err_u_rel=%.4e err_p_rel=%.4e", config.variant.label, n,
             rep.err_u_1h_rel, rep.err_p_0_rel)
    return StudyRecord(level, n, rep.n_dofs, mesh.h_max, mesh.aspect_ratio,
                       rep.err_u_1h_rel, rep.err_p_0_rel, rep.err_u_1h, rep.err_p_0,
                       sol.residual_norm)


def _run_level_job(args):
    return run_level(*args)


def run_convergence(config: StudyConfig, write: bool = True):
    """Solve on every level and attach observed orders ``log2(e_n / e_2n)``
    (scaled by the actual refinement ratio). Writes ``results.csv``,
    ``plot.svg`` and ``manifest.txt`` to ``config.out`` when set."""
    norms = reference_norms(config)
    jobs = [(config, k, norms) for k in range(len(config.levels))]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_level_job, jobs))
    else:
        records = [_run_level_job(j) for j in jobs]
    records.sort(key=lambda r: r.level)
    for prev, rec in zip(records, records[1:]):
        ratio = rec.n / prev.n
        rec.order_u = observed_order(prev.err_u_rel, rec.err_u_rel, ratio)
        rec.order_p = observed_order(prev.err_p_rel, rec.err_p_rel, ratio)
    if write and config.out:
        from .report import write_study
        write_study(Path(config.out), {config.variant.label: records}, config)
    return records
