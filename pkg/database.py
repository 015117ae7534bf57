from sqlalchemy import create_engine, Column, Integer, String, Float, DateTime, JSON
from sqlalchemy.orm import declarative_base, sessionmaker, Session
from datetime import datetime
from typing import List, Optional
import os
import logging

logger = logging.getLogger(__name__)

# Create database engine
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./workbench_runs.db")

# SQLite special configuration
if DATABASE_URL.startswith("sqlite"):
    engine = create_engine(
        DATABASE_URL,
        connect_args={"check_same_thread": False},
        echo=False
    )
else:
    engine = create_engine(DATABASE_URL, echo=False)

# Create session factory
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

# Base class for models
Base = declarative_base()

# Database Models
class RunRecord(Base):
    __tablename__ = "run_records"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(50), nullable=False, index=True)
    parameters = Column(JSON, nullable=False)
    versions = Column(JSON, nullable=False)
    digest = Column(String(64), nullable=False, index=True)
    elapsed_seconds = Column(Float)
    created_at = Column(DateTime, default=datetime.utcnow, index=True)

# Database initialization
def init_database(bind=None):
    """
    Create the run ledger tables
    """
    try:
        logger.info("Creating database tables...")
        Base.metadata.create_all(bind=bind or engine)
        logger.info("✅ Database initialized successfully")
        return True

    except Exception as e:
        logger.error(f"❌ Error initializing database: {e}")
        return False

def reset_database(bind=None):
    """
    Drop every recorded run and recreate the tables
    """
    try:
        logger.info("Dropping run ledger tables...")
        Base.metadata.drop_all(bind=bind or engine)
    except Exception as e:
        logger.error(f"❌ Error dropping tables: {e}")
        return False
    return init_database(bind)

def prune_runs(keep: int, db: Optional[Session] = None) -> int:
    """
    Delete all but the `keep` most recent runs; returns the number deleted
    """
    if keep < 0:
        raise ValueError(f"keep must be non-negative, got {keep}")
    owned = db is None
    db = db or SessionLocal()
    try:
        kept = [
            row_id for (row_id,) in db.query(RunRecord.id)
            .order_by(RunRecord.created_at.desc(), RunRecord.id.desc())
            .limit(keep)
        ]
        deleted = (
            db.query(RunRecord)
            .filter(RunRecord.id.notin_(kept))
            .delete(synchronize_session=False)
        )
        db.commit()
        logger.info(f"✅ Pruned {deleted} runs, kept {len(kept)}")
        return deleted
    except Exception:
        db.rollback()
        raise
    finally:
        if owned:
            db.close()

def record_run(manifest, db: Optional[Session] = None) -> Optional[int]:
    """
    Store a RunManifest; returns the new row id, or None when the write failed
    """
    owned = db is None
    db = db or SessionLocal()
    try:
        record = RunRecord(
            command=manifest.command,
            parameters=manifest.parameters,
            versions=manifest.versions,
            digest=manifest.digest,
            elapsed_seconds=manifest.timing.get("total"),
        )
        db.add(record)
        db.commit()
        db.refresh(record)
        logger.info(f"✅ Recorded {manifest.command} run #{record.id} ({manifest.digest[:12]})")
        return record.id

    except Exception as e:
        db.rollback()
        logger.error(f"❌ Error recording run: {e}")
        return None
    finally:
        if owned:
            db.close()

def recent_runs(limit: int = 20, db: Optional[Session] = None) -> List[RunRecord]:
    owned = db is None
    db = db or SessionLocal()
    try:
        return (
            db.query(RunRecord)
            .order_by(RunRecord.created_at.desc(), RunRecord.id.desc())
            .limit(limit)
            .all()
        )
    finally:
        if owned:
            db.close()
