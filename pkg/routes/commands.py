"""
Command handlers for the workbench CLI
Each sub-command validates its arguments, calls into services and returns a
pydantic model; failures are mapped to CommandError with the exit code.
"""

import argparse
import json
import logging
import os
from pathlib import Path
from typing import Callable, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ValidationError

from database import init_database, recent_runs
from models import (
    AcceptanceCheckModel, AuditReportModel, CellModel, CellTableModel, CohenTableModel,
    DeltaRowModel, EmbeddingTrialModel, EquivariantSeriesModel, HomologyDegreeModel,
    HomologyReportModel, LensReportModel, MonomialModel, ObstructionReportModel,
    OrbitModel, RunListModel, RunRecordResponse, SuiteReportModel, WeightedPointModel,
)
from services import acceptance_suite, cohen_algebra, mod_p_pipeline, moduli_embedding
from services import weighted_projective_lens as lens
from services.cactus_cells import Shape, configured_max_n, enumerate_cells, orbits_and_stabilizers
from services.chain_algebra import ChainComplex, Coefficients, HomologyResult, cactus_chain_complex, homology
from services.equivariant_quotient import full_quotient_complex
from services.errors import InvalidInputError, WorkbenchError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SPACES = {"based": Shape.LINEAR, "unbased": Shape.CYCLIC}
COHEN_OPS = ("basis", "delta", "coker", "equivariant")
AUDITS = ("mayer-vietoris", "acyclicity", "strict-vs-homotopy")


class CommandError(Exception):
    def __init__(self, exit_code: int, detail: str):
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail


class UsageError(CommandError):
    def __init__(self, detail: str):
        super().__init__(EXIT_USAGE, detail)


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got '{text}'")


def default_threads() -> int:
    return int(os.getenv("WORKBENCH_THREADS", "1"))


# Conversions
def degrees_model(result: HomologyResult) -> List[HomologyDegreeModel]:
    return [HomologyDegreeModel(degree=h.degree, betti=h.betti, torsion=list(h.torsion)) for h in result.degrees]


def monomial_model(m) -> MonomialModel:
    return MonomialModel(**m.to_dict())


def lens_report(spec: lens.LensSpec, oracle: bool = False) -> LensReportModel:
    result = lens.lens_homology(spec)
    agrees = None
    if oracle:
        agrees = lens.subdivision_oracle(spec).degrees == result.degrees
        if not agrees:
            logger.warning(f"{spec.label}: join model and subdivision oracle disagree")
    return LensReportModel(
        m=spec.m,
        weights=list(spec.weights),
        label=spec.label,
        free=spec.is_free,
        cell_counts=list(lens.lens_chain_complex(spec).dims),
        degrees=degrees_model(result),
        homology_sphere=lens.is_homology_sphere(result, spec.sphere_dim),
        oracle_agrees=agrees,
    )


def audit_model(report: mod_p_pipeline.AuditReport) -> AuditReportModel:
    return AuditReportModel(
        name=report.name, n=report.n, p=report.p, passed=report.passed,
        details=report.details, failures=report.failures,
    )


# Handlers
def cells_command(args) -> CellTableModel:
    if args.space not in SPACES:
        raise InvalidInputError(f"cells supports based|unbased, got '{args.space}'")
    shape = SPACES[args.space]
    grouped = enumerate_cells(args.n, shape)
    everything = [cell for dim in grouped for cell in grouped[dim]]
    orbits = None
    if shape == Shape.CYCLIC:
        orbits = [
            OrbitModel(
                representative=CellModel(**s.representative.to_dict()),
                orbit_size=s.orbit_size,
                stabilizer_order=s.stabilizer.order,
                stabilizer=[(r, list(perm)) for r, perm in s.stabilizer.elements],
            )
            for s in orbits_and_stabilizers(everything, args.n)
        ]
    return CellTableModel(
        n=args.n,
        space=args.space,
        counts={dim: len(cells) for dim, cells in grouped.items()},
        cells=[CellModel(**cell.to_dict()) for cell in everything] if args.list else None,
        orbits=orbits,
    )


def _space_complex(n: int, space: str) -> ChainComplex:
    if space == "quotient":
        return full_quotient_complex(n)
    if space not in SPACES:
        raise InvalidInputError(f"Unknown space '{space}' (expected based, unbased or quotient)")
    return cactus_chain_complex(n, SPACES[space])


def homology_command(args) -> HomologyReportModel:
    coefficients = Coefficients.parse(args.coeff)
    complex_ = _space_complex(args.n, args.space)
    result = homology(complex_, coefficients)
    return HomologyReportModel(
        n=args.n,
        space=args.space,
        coefficients=coefficients.label,
        cell_counts=list(complex_.dims),
        euler_characteristic=result.euler_characteristic(),
        degrees=degrees_model(result),
    )


def cohen_command(args) -> BaseModel:
    n, p = args.n, args.p
    if args.op == "basis":
        return CohenTableModel(n=n, p=p, op=args.op, basis=[monomial_model(m) for m in cohen_algebra.basis(n, p)])
    if args.op == "delta":
        rows = []
        for m in cohen_algebra.basis(n, p):
            term = cohen_algebra.delta(m, p)
            rows.append(DeltaRowModel(
                source=monomial_model(m),
                coefficient=term.coefficient,
                raw_coefficient=term.raw_coefficient,
                target=monomial_model(term.target) if term.target is not None else None,
            ))
        return CohenTableModel(n=n, p=p, op=args.op, delta=rows)
    if args.op == "coker":
        return CohenTableModel(n=n, p=p, op=args.op, dims=cohen_algebra.coker_delta_dims(n, p))
    series = cohen_algebra.equivariant_series(n, p, args.max_degree)
    return EquivariantSeriesModel(
        n=n, p=p, branch=series.branch, fiber_dims=list(series.fiber_dims), dims=list(series.dims),
    )


def lens_command(args) -> BaseModel:
    if args.moduli_n is not None:
        report = lens.manifold_obstruction(args.moduli_n)
        conclusion = (
            "link is a homology sphere; no obstruction at the cone point"
            if report.homology_sphere
            else f"link {report.lens.label} is not a homology sphere; P({args.moduli_n},...,2) is not a manifold"
        )
        return ObstructionReportModel(
            n=report.n,
            lens=lens_report(report.lens, args.oracle),
            reduced=degrees_model(report.reduced),
            local_homology={
                k: HomologyDegreeModel(degree=k, betti=betti, torsion=list(torsion))
                for k, (betti, torsion) in report.local_homology.items()
            },
            manifold_point=report.is_manifold_point,
            conclusion=conclusion,
        )
    if args.m is None or not args.weights:
        raise UsageError("lens needs --m and --weights, or --moduli-n")
    return lens_report(lens.LensSpec(args.m, tuple(args.weights)), args.oracle)


def _load_points(path: str) -> List[complex]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"Cannot read points from {path}: {e}")
    if isinstance(raw, dict):
        raw = raw.get("points", [])
    points = []
    for entry in raw:
        if isinstance(entry, (int, float)):
            points.append(complex(entry, 0.0))
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            points.append(complex(float(entry[0]), float(entry[1])))
        else:
            raise InvalidInputError(f"Point entries must be numbers or [re, im] pairs, got {entry!r}")
    return points


def embed_command(args) -> BaseModel:
    if args.points:
        point = moduli_embedding.embed(moduli_embedding.Configuration(tuple(_load_points(args.points))))
        return WeightedPointModel(
            n=len(point.coords) + 1,
            coords=[(c.real, c.imag) for c in point.coords],
            weights=list(point.weights),
        )
    if args.n is None:
        raise UsageError("embed needs --points FILE, or --n with --samples/--seed")
    report = moduli_embedding.property_trials(args.n, args.samples, args.seed)
    return EmbeddingTrialModel(
        n=report.n,
        samples=report.samples,
        seed=report.seed,
        invariance_failures=report.invariance_failures,
        vanishing_failures=report.vanishing_failures,
        distinguished_fraction=report.distinguished_fraction,
        passed=report.passed,
    )


def verify_command(args) -> BaseModel:
    if args.audit:
        if args.n is None or args.p is None:
            raise UsageError("verify --audit needs --n and --p")
        if args.audit == "mayer-vietoris":
            cellular = homology(full_quotient_complex(args.n), Coefficients(args.p))
            return audit_model(mod_p_pipeline.mayer_vietoris_audit(args.n, args.p, cellular))
        if args.audit == "acyclicity":
            return audit_model(mod_p_pipeline.acyclicity_check(args.p))
        return audit_model(mod_p_pipeline.strict_equals_homotopy_audit(args.n, args.p))

    options = acceptance_suite.SuiteOptions(
        max_n=args.max_n if args.max_n is not None else min(acceptance_suite.SUITE_MAX_N, configured_max_n()),
        samples=args.samples,
        seed=args.seed,
    )
    checks, timings = acceptance_suite.run_suite(options, threads=args.threads, sections=args.sections)
    args.timings = timings
    models = [AcceptanceCheckModel(criterion=c.criterion, name=c.name, status=c.status, details=c.details)
              for c in checks]
    return SuiteReportModel(
        passed=sum(c.status == acceptance_suite.PASSED for c in checks),
        failed=sum(c.status == acceptance_suite.FAILED for c in checks),
        skipped=sum(c.status == acceptance_suite.SKIPPED for c in checks),
        checks=models,
    )


def runs_command(args) -> RunListModel:
    if not init_database():
        raise CommandError(EXIT_FAILURE, "Run ledger is unavailable")
    return RunListModel(runs=[RunRecordResponse.model_validate(r) for r in recent_runs(args.limit)])


HANDLERS: Dict[str, Callable] = {
    "cells": cells_command,
    "homology": homology_command,
    "cohen": cohen_command,
    "lens": lens_command,
    "embed": embed_command,
    "verify": verify_command,
    "runs": runs_command,
}


def dispatch(args) -> BaseModel:
    try:
        return HANDLERS[args.command](args)
    except CommandError:
        raise
    except (InvalidInputError, ValidationError) as e:
        logger.error(f"Invalid input for {args.command}: {e}")
        raise CommandError(EXIT_USAGE, str(e))
    except WorkbenchError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        raise CommandError(EXIT_FAILURE, f"{type(e).__name__}: {e}")


# CSV export
def result_frame(command: str, result: BaseModel) -> pd.DataFrame:
    if isinstance(result, HomologyReportModel):
        return pd.DataFrame([
            {"degree": h.degree, "betti": h.betti, "torsion": ",".join(str(t) for t in h.torsion),
             "cells": result.cell_counts[h.degree] if h.degree < len(result.cell_counts) else 0}
            for h in result.degrees
        ])
    if isinstance(result, CohenTableModel):
        if result.basis is not None:
            return pd.DataFrame([m.model_dump() for m in result.basis])
        if result.delta is not None:
            return pd.DataFrame([
                {"source": row.source.monomial, "degree": row.source.degree, "coefficient": row.coefficient,
                 "raw_coefficient": row.raw_coefficient, "target": row.target.monomial if row.target else ""}
                for row in result.delta
            ])
        return pd.DataFrame({"degree": list(result.dims), "dim": list(result.dims.values())})
    if isinstance(result, EquivariantSeriesModel):
        return pd.DataFrame({"degree": range(len(result.dims)), "dim": result.dims})
    if isinstance(result, CellTableModel):
        if result.cells is not None:
            return pd.DataFrame([c.model_dump() for c in result.cells])
        return pd.DataFrame({"dim": list(result.counts), "cells": list(result.counts.values())})
    if isinstance(result, SuiteReportModel):
        return pd.DataFrame([
            {"criterion": c.criterion, "name": c.name, "status": c.status} for c in result.checks
        ])
    raise UsageError(f"--csv is not available for {command}")


def export_csv(command: str, result: BaseModel, path: str) -> None:
    frame = result_frame(command, result)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(frame)} rows to {path}")


# Parser
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="workbench", description="Moduli quotient verification workbench")
    parser.add_argument("--threads", type=int, default=default_threads(), help="Worker processes (WORKBENCH_THREADS)")
    parser.add_argument("--record", action="store_true", help="Store the run manifest in the run ledger")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    cells = sub.add_parser("cells", help="Enumerate cactus cells")
    cells.add_argument("--n", type=int, required=True)
    cells.add_argument("--space", choices=sorted(SPACES), default="based")
    cells.add_argument("--list", action="store_true", help="Include every cell, not only counts")
    cells.add_argument("--csv")

    homology_ = sub.add_parser("homology", help="Cellular homology of C_n, C_n/S^1 or the full quotient")
    homology_.add_argument("--n", type=int, required=True)
    homology_.add_argument("--space", choices=sorted(SPACES) + ["quotient"], default="quotient")
    homology_.add_argument("--coeff", default="z", help="z, f2, f3, f5, ...")
    homology_.add_argument("--csv")

    cohen = sub.add_parser("cohen", help="Mod-p homology of configuration spaces")
    cohen.add_argument("--n", type=int, required=True)
    cohen.add_argument("--p", type=int, required=True)
    cohen.add_argument("--op", choices=COHEN_OPS, default="basis")
    cohen.add_argument("--max-degree", type=int, default=None)
    cohen.add_argument("--csv")

    lens_ = sub.add_parser("lens", help="Lens complexes and the weighted projective obstruction")
    lens_.add_argument("--m", type=int)
    lens_.add_argument("--weights", type=_int_list)
    lens_.add_argument("--moduli-n", type=int)
    lens_.add_argument("--oracle", action="store_true", help="Cross-check by barycentric subdivision")

    embed = sub.add_parser("embed", help="Configurations to P(n, n-1, ..., 2)")
    embed.add_argument("--points", help="JSON file with numbers or [re, im] pairs")
    embed.add_argument("--n", type=int)
    embed.add_argument("--samples", type=int, default=1000)
    embed.add_argument("--seed", type=int, default=0)

    verify = sub.add_parser("verify", help="Acceptance suite and individual audits")
    mode = verify.add_mutually_exclusive_group(required=True)
    mode.add_argument("--paper-suite", action="store_true")
    mode.add_argument("--audit", choices=AUDITS)
    verify.add_argument("--n", type=int)
    verify.add_argument("--p", type=int)
    verify.add_argument("--max-n", type=int, default=None)
    verify.add_argument("--samples", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=20240601)
    verify.add_argument("--sections", type=lambda s: [v for v in s.split(",") if v], default=None)
    verify.add_argument("--csv")

    runs = sub.add_parser("runs", help="Recent entries of the run ledger")
    runs.add_argument("--limit", type=int, default=20)
    return parser


def parameters(args) -> Dict:
    """JSON-safe view of the parsed arguments, without process-level options"""
    skip = {"threads", "record", "csv", "timings"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def exit_code_for(result: BaseModel) -> int:
    if isinstance(result, SuiteReportModel) and result.failed:
        return EXIT_FAILURE
    if isinstance(result, AuditReportModel) and not result.passed:
        return EXIT_FAILURE
    return EXIT_OK


def timings_of(args) -> Optional[Dict[str, float]]:
    return getattr(args, "timings", None)
