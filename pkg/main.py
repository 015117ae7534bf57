#!/usr/bin/env python3
"""
Moduli quotient verification workbench
Single entry point: `python main.py <command> [options]`, JSON on stdout.
"""

import hashlib
import json
import logging
import os
import platform
import sys
import time
from typing import Dict, List, Optional

from dotenv import load_dotenv

load_dotenv()

logging.basicConfig(
    level=os.getenv("LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

from routes.commands import (  # noqa: E402
    EXIT_USAGE, CommandError, build_parser, dispatch, exit_code_for, export_csv, parameters, timings_of,
)
from models import RunManifest  # noqa: E402

VERSION = "1.0.0"


def versions() -> Dict[str, str]:
    import numpy
    import pandas
    import pydantic
    import sympy

    return {
        "workbench": VERSION,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "pandas": pandas.__version__,
        "pydantic": pydantic.__version__,
        "sympy": sympy.__version__,
    }


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def digest_of(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def record_enabled(args) -> bool:
    flag = os.getenv("WORKBENCH_RECORD_RUNS", "").strip().lower()
    return args.record or flag in ("1", "true", "yes", "on")


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except CommandError as e:
        logger.error(e.detail)
        return e.exit_code
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        result = dispatch(args)
        if getattr(args, "csv", None):
            export_csv(args.command, result, args.csv)
    except CommandError as e:
        logger.error(f"❌ {e.detail}")
        return e.exit_code

    payload = result.model_dump(mode="json")
    timing = {"total": round(time.perf_counter() - started, 3)}
    timing.update({name: round(t, 3) for name, t in (timings_of(args) or {}).items()})
    manifest = RunManifest(
        command=args.command,
        parameters=parameters(args),
        versions=versions(),
        timing=timing,
        digest=digest_of(payload),
    )
    if record_enabled(args) and args.command != "runs":
        from database import init_database, record_run

        if init_database():
            record_run(manifest)

    stdout.write(json.dumps({"manifest": manifest.model_dump(mode="json"), "result": payload},
                            sort_keys=True, indent=2))
    stdout.write("\n")
    code = exit_code_for(result)
    logger.info(f"{args.command} finished in {timing['total']:.2f}s with exit code {code}")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
