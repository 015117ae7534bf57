from pydantic import BaseModel, Field
from typing import Optional, List, Dict, Any, Tuple
from datetime import datetime

# Cell Models
class CellModel(BaseModel):
    word: List[int] = Field(..., description="Lobe labels in order (canonical rotation when cyclic)")
    shape: str = Field(..., pattern="^(linear|cyclic)$", description="linear for C_n, cyclic for C_n/S^1")
    n: int = Field(..., ge=1, description="Number of lobes")
    dim: int = Field(..., ge=0, description="Cell dimension, word length minus n")

class OrbitModel(BaseModel):
    representative: CellModel
    orbit_size: int = Field(..., ge=1)
    stabilizer_order: int = Field(..., ge=1)
    stabilizer: List[Tuple[int, List[int]]] = Field(default_factory=list, description="(rotation, permutation) pairs")

class CellTableModel(BaseModel):
    n: int
    space: str
    counts: Dict[int, int] = Field(..., description="Cells per dimension")
    cells: Optional[List[CellModel]] = None
    orbits: Optional[List[OrbitModel]] = None

# Homology Models
class HomologyDegreeModel(BaseModel):
    degree: int = Field(..., ge=0)
    betti: int = Field(..., ge=0, description="Rank over Z, or dimension over F_p")
    torsion: List[int] = Field(default_factory=list, description="Invariant factors > 1")

class HomologyReportModel(BaseModel):
    n: Optional[int] = None
    space: str
    coefficients: str = Field(..., description="Z or F<p>")
    cell_counts: List[int]
    euler_characteristic: int
    degrees: List[HomologyDegreeModel]

# Cohen Algebra Models
class MonomialModel(BaseModel):
    monomial: str
    degree: int
    weight: int

class DeltaRowModel(BaseModel):
    source: MonomialModel
    coefficient: int = Field(..., description="Coefficient reduced mod p")
    raw_coefficient: int
    target: Optional[MonomialModel] = None

class CohenTableModel(BaseModel):
    n: int
    p: int
    op: str
    basis: Optional[List[MonomialModel]] = None
    delta: Optional[List[DeltaRowModel]] = None
    dims: Optional[Dict[int, int]] = None

class EquivariantSeriesModel(BaseModel):
    n: int
    p: int
    branch: str = Field(..., description="tensor when n = 0,1 mod p (always for p = 2), cokernel otherwise")
    fiber_dims: List[int]
    dims: List[int]

# Lens Models
class LensReportModel(BaseModel):
    m: int = Field(..., ge=2)
    weights: List[int]
    label: str
    free: bool
    cell_counts: List[int]
    degrees: List[HomologyDegreeModel]
    homology_sphere: bool
    oracle_agrees: Optional[bool] = Field(None, description="Set when --oracle recomputed the quotient by subdivision")

class ObstructionReportModel(BaseModel):
    n: int = Field(..., ge=3)
    lens: LensReportModel
    reduced: List[HomologyDegreeModel]
    local_homology: Dict[int, HomologyDegreeModel] = Field(..., description="H_k(P, P - pt) by k")
    manifold_point: bool
    conclusion: str

# Embedding Models
class WeightedPointModel(BaseModel):
    n: int
    coords: List[Tuple[float, float]] = Field(..., description="(re, im) of a_0 .. a_{n-2}")
    weights: List[int]

class EmbeddingTrialModel(BaseModel):
    n: int
    samples: int
    seed: int
    invariance_failures: int
    vanishing_failures: int
    distinguished_fraction: float
    passed: bool

# Audit and Suite Models
class AuditReportModel(BaseModel):
    name: str
    n: int
    p: int
    passed: bool
    details: Dict[str, Any] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)

class AcceptanceCheckModel(BaseModel):
    criterion: int
    name: str
    status: str = Field(..., pattern="^(passed|failed|skipped)$")
    details: Dict[str, Any] = Field(default_factory=dict)

class SuiteReportModel(BaseModel):
    passed: int
    failed: int
    skipped: int
    checks: List[AcceptanceCheckModel]

# Run Manifest
class RunManifest(BaseModel):
    command: str
    parameters: Dict[str, Any]
    versions: Dict[str, str]
    timing: Dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds, not part of the digest")
    digest: str = Field(..., description="SHA-256 of the canonical JSON result")

class RunRecordResponse(BaseModel):
    id: int
    command: str
    parameters: Dict[str, Any]
    versions: Dict[str, str]
    digest: str
    elapsed_seconds: Optional[float]
    created_at: datetime

    class Config:
        from_attributes = True

class RunListModel(BaseModel):
    runs: List[RunRecordResponse]
