#!/usr/bin/env python3
"""
Run ledger maintenance for the moduli quotient workbench
Creates the tables used by `--record`, and can reset the ledger or prune old runs
"""

from dotenv import load_dotenv
import argparse
import logging
import sys

load_dotenv()

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Create, reset or prune the run ledger")
    parser.add_argument("--reset", action="store_true", help="Drop every recorded run first")
    parser.add_argument("--keep", type=int, help="Keep only the N most recent runs")
    return parser

def init_database(argv=None, bind=None, db=None):
    """
    Create the run ledger tables, then apply --reset / --keep
    Returns a process exit code
    """
    args = build_parser().parse_args(argv)
    if args.keep is not None and args.keep < 0:
        logger.error(f"❌ --keep must be non-negative, got {args.keep}")
        return 2

    try:
        from database import DATABASE_URL, prune_runs, reset_database
        from database import init_database as db_init

        logger.info("Initializing run ledger with SQLAlchemy...")
        success = reset_database(bind) if args.reset else db_init(bind)
        if not success:
            logger.error("❌ Run ledger initialization failed!")
            return 1

        if args.keep is not None:
            deleted = prune_runs(args.keep, db=db)
            logger.info(f"Removed {deleted} old runs")

        logger.info(f"✅ Run ledger ready at {DATABASE_URL}")
        return 0

    except Exception as e:
        logger.error(f"❌ Error during database initialization: {e}")
        return 1

if __name__ == "__main__":
    sys.exit(init_database())
