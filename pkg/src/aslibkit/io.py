"""Scenario directory reading/writing and the repository fetcher."""

from __future__ import annotations

import hashlib
import io
import math
import os
import shutil
import tempfile
import urllib.error
import urllib.request
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from filelock import FileLock

from .arff import ArffTable, Attribute, parse_arff, serialize_arff
from .description import parse_description, serialize_description
from .errors import AslibError, FetchError, FormatError
from .scenario import (
    CITATION_FILE,
    COSTS_FILE,
    CV_FILE,
    DESCRIPTION_FILE,
    FEATURES_FILE,
    GROUND_TRUTH_FILE,
    README_FILE,
    RUN_STATUSES,
    RUNS_FILE,
    STATUS_FILE,
    STEP_STATUSES,
    CVFolds,
    FeatureCostTable,
    FeatureStepStatusTable,
    FeatureTable,
    RunRecord,
    Scenario,
)

MANDATORY_FILES = (DESCRIPTION_FILE, RUNS_FILE, FEATURES_FILE, STATUS_FILE, CV_FILE)
OPTIONAL_FILES = (COSTS_FILE, GROUND_TRUTH_FILE, README_FILE, CITATION_FILE)

DEFAULT_BASE_URL = "https://raw.githubusercontent.com/coseal/aslib_data/master"


# --------------------------------------------------------------------------- loading


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise FormatError("IO", f"missing file {path.name}", file=path.name) from None
    except OSError as exc:
        raise FormatError("IO", str(exc), file=path.name) from None


def _arff(path: Path) -> ArffTable:
    try:
        return parse_arff(_read(path))
    except AslibError as exc:
        raise exc.located(path.name) from None


def _key_columns(table: ArffTable, fname: str) -> tuple[int, int | None]:
    inst = table.find_column("instance_id")
    if inst is None:
        raise FormatError("MISSING_COLUMN", "no instance_id column", file=fname)
    rep = table.find_column("repetition")
    return inst, rep


def _rep(value, fname, line) -> int:
    if value is None:
        return 1
    if not float(value).is_integer():
        raise FormatError("DOMAIN", f"repetition {value!r} is not an integer", file=fname, line=line)
    return int(value)


def _float(v) -> float:
    if v is None:
        return math.nan
    return float(v)


def _require_numeric(table: ArffTable, cols: list[int], fname: str):
    for c in cols:
        if table.attributes[c].kind != "numeric":
            raise FormatError("DOMAIN", f"column {table.attributes[c].name!r} must be numeric", file=fname)


def _load_runs(table: ArffTable, meta, fname=RUNS_FILE) -> list[RunRecord]:
    inst, rep = _key_columns(table, fname)
    alg = table.find_column("algorithm")
    status = table.find_column("runstatus")
    if alg is None or status is None:
        raise FormatError("MISSING_COLUMN", "algorithm_runs needs algorithm and runstatus columns", file=fname)
    mcols = []
    for m in meta.measures:
        c = table.find_column(m.name)
        if c is None:
            raise FormatError("MISSING_COLUMN", f"no column for measure {m.name!r}", file=fname)
        mcols.append(c)
    _require_numeric(table, mcols, fname)
    sign = [-1.0 if m.maximize else 1.0 for m in meta.measures]
    runs = []
    for n, row in enumerate(table.rows):
        line = table.line_of(n)
        st = row[status]
        if st is None:
            raise FormatError("DOMAIN", "runstatus is missing", file=fname, line=line)
        if st not in RUN_STATUSES:
            raise FormatError("DOMAIN", f"unknown run status {st!r}", file=fname, line=line)
        if row[inst] is None or row[alg] is None:
            raise FormatError("DOMAIN", "instance_id/algorithm missing", file=fname, line=line)
        values = tuple(None if row[c] is None or math.isnan(row[c]) else s * row[c] for c, s in zip(mcols, sign))
        runs.append(RunRecord(str(row[inst]), _rep(row[rep] if rep is not None else None, fname, line), str(row[alg]), values, st))
    return runs


def _keys(table: ArffTable, fname: str):
    inst, rep = _key_columns(table, fname)
    instances, reps = [], []
    for n, row in enumerate(table.rows):
        if row[inst] is None:
            raise FormatError("DOMAIN", "instance_id missing", file=fname, line=table.line_of(n))
        instances.append(str(row[inst]))
        reps.append(_rep(row[rep] if rep is not None else None, fname, table.line_of(n)))
    skip = {inst} | ({rep} if rep is not None else set())
    cols = [c for c in range(len(table.attributes)) if c not in skip]
    return instances, reps, cols


def _load_features(table: ArffTable, fname=FEATURES_FILE) -> FeatureTable:
    instances, reps, cols = _keys(table, fname)
    _require_numeric(table, cols, fname)
    values = np.array([[_float(row[c]) for c in cols] for row in table.rows], dtype=float).reshape(len(instances), len(cols))
    return FeatureTable(instances, reps, [table.attributes[c].name for c in cols], values)


def _load_status(table: ArffTable, fname=STATUS_FILE) -> FeatureStepStatusTable:
    instances, reps, cols = _keys(table, fname)
    rows = []
    for n, row in enumerate(table.rows):
        out = []
        for c in cols:
            v = row[c]
            if v is not None and v not in STEP_STATUSES:
                raise FormatError("DOMAIN", f"unknown feature step status {v!r}", file=fname, line=table.line_of(n))
            out.append(v)
        rows.append(tuple(out))
    return FeatureStepStatusTable(instances, reps, [table.attributes[c].name for c in cols], rows)


def _load_costs(table: ArffTable, fname=COSTS_FILE) -> FeatureCostTable:
    instances, reps, cols = _keys(table, fname)
    _require_numeric(table, cols, fname)
    values = np.array([[_float(row[c]) for c in cols] for row in table.rows], dtype=float).reshape(len(instances), len(cols))
    return FeatureCostTable(instances, reps, [table.attributes[c].name for c in cols], values)


def _load_cv(table: ArffTable, fname=CV_FILE) -> CVFolds:
    instances, reps, _ = _keys(table, fname)
    fold = table.find_column("fold")
    if fold is None:
        raise FormatError("MISSING_COLUMN", "no fold column", file=fname)
    folds = []
    for n, row in enumerate(table.rows):
        v = row[fold]
        if v is None or not float(v).is_integer():
            raise FormatError("DOMAIN", f"fold {v!r} is not an integer", file=fname, line=table.line_of(n))
        folds.append(int(v))
    return CVFolds(instances, reps, folds)


def _text(path: Path) -> str | None:
    if not path.exists():
        return None
    return _read(path).decode("utf-8")


def load_scenario(directory: str | os.PathLike) -> Scenario:
    """Load a scenario directory; optional files absent means absent fields."""
    d = Path(directory)
    if not d.is_dir():
        raise FormatError("IO", f"{d} is not a directory")
    for name in MANDATORY_FILES:
        if not (d / name).is_file():
            raise FormatError("IO", f"missing mandatory file {name}", file=name)
    try:
        meta = parse_description(_read(d / DESCRIPTION_FILE))
    except AslibError as exc:
        raise exc.located(DESCRIPTION_FILE) from None
    runs = _load_runs(_arff(d / RUNS_FILE), meta)
    features = _load_features(_arff(d / FEATURES_FILE))
    status = _load_status(_arff(d / STATUS_FILE))
    folds = _load_cv(_arff(d / CV_FILE))
    costs = _load_costs(_arff(d / COSTS_FILE)) if (d / COSTS_FILE).is_file() else None
    truth = _arff(d / GROUND_TRUTH_FILE) if (d / GROUND_TRUTH_FILE).is_file() else None
    if truth is not None:
        truth = ArffTable(truth.relation, truth.attributes, truth.rows)
    return Scenario(
        meta=meta,
        runs=runs,
        features=features,
        feature_status=status,
        folds=folds,
        feature_costs=costs,
        ground_truth=truth,
        readme=_text(d / README_FILE),
        citations=_text(d / CITATION_FILE),
    )


# --------------------------------------------------------------------------- writing


def _key_attrs():
    return [Attribute("instance_id", "string"), Attribute("repetition", "numeric")]


def _none_if_nan(v: float):
    return None if math.isnan(v) else float(v)


def scenario_tables(scenario: Scenario) -> dict[str, ArffTable]:
    """The ARFF tables ``write_scenario`` emits, in canonical row order."""
    s = scenario.canonical()
    meta = s.meta
    sign = [-1.0 if m.maximize else 1.0 for m in meta.measures]
    runs = ArffTable(
        "ALGORITHM_RUNS",
        tuple(
            _key_attrs()
            + [Attribute("algorithm", "string")]
            + [Attribute(m.name, "numeric") for m in meta.measures]
            + [Attribute("runstatus", "nominal", RUN_STATUSES)]
        ),
        tuple(
            (r.instance_id, float(r.repetition), r.algorithm_id)
            + tuple(None if v is None else sg * v + 0.0 for v, sg in zip(r.values, sign))
            + (r.status,)
            for r in s.runs
        ),
    )
    ft = s.features
    features = ArffTable(
        "FEATURE_VALUES",
        tuple(_key_attrs() + [Attribute(f, "numeric") for f in ft.feature_names]),
        tuple(
            (i, float(r)) + tuple(_none_if_nan(v) for v in row)
            for i, r, row in zip(ft.instances, ft.repetitions, ft.values)
        ),
    )
    st = s.feature_status
    status = ArffTable(
        "FEATURE_RUNSTATUS",
        tuple(_key_attrs() + [Attribute(step, "nominal", STEP_STATUSES) for step in st.steps]),
        tuple((i, float(r)) + tuple(row) for i, r, row in zip(st.instances, st.repetitions, st.status)),
    )
    cv = s.folds
    folds = ArffTable(
        "CV",
        tuple(_key_attrs() + [Attribute("fold", "numeric")]),
        tuple((i, float(r), float(f)) for i, r, f in zip(cv.instances, cv.repetitions, cv.folds)),
    )
    out = {RUNS_FILE: runs, FEATURES_FILE: features, STATUS_FILE: status, CV_FILE: folds}
    if s.feature_costs is not None:
        fc = s.feature_costs
        out[COSTS_FILE] = ArffTable(
            "FEATURE_COSTS",
            tuple(_key_attrs() + [Attribute(step, "numeric") for step in fc.steps]),
            tuple(
                (i, float(r)) + tuple(_none_if_nan(v) for v in row)
                for i, r, row in zip(fc.instances, fc.repetitions, fc.costs)
            ),
        )
    if s.ground_truth is not None:
        out[GROUND_TRUTH_FILE] = s.ground_truth
    return out


def write_scenario(scenario: Scenario, directory: str | os.PathLike) -> Path:
    """Write the full file set in canonical form. Returns the directory."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        (d / DESCRIPTION_FILE).write_bytes(serialize_description(scenario.meta).encode("utf-8"))
        for name, table in scenario_tables(scenario).items():
            (d / name).write_bytes(serialize_arff(table).encode("utf-8"))
        if scenario.feature_costs is None and (d / COSTS_FILE).exists():
            (d / COSTS_FILE).unlink()
        if scenario.readme is not None:
            (d / README_FILE).write_bytes(scenario.readme.encode("utf-8"))
        if scenario.citations is not None:
            (d / CITATION_FILE).write_bytes(scenario.citations.encode("utf-8"))
    except OSError as exc:
        raise FormatError("IO", str(exc)) from None
    return d


# --------------------------------------------------------------------------- fetching


def default_cache_dir() -> Path:
    env = os.environ.get("ASLIBKIT_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "aslibkit"


@dataclass
class RepoConfig:
    base_url: str = DEFAULT_BASE_URL
    cache_dir: Path = field(default_factory=default_cache_dir)
    timeout: float = 30.0

    def __post_init__(self):
        if not self.base_url:
            raise ValueError("base_url must be nonempty")
        env = os.environ.get("ASLIBKIT_CACHE")
        self.cache_dir = Path(env) if env else Path(self.cache_dir)


def _get(url: str, timeout: float) -> bytes | None:
    """GET ``url``; None on 404."""
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except urllib.error.HTTPError as exc:
        if exc.code == 404:
            return None
        raise FetchError("NETWORK", f"HTTP {exc.code} for {url}") from None
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError("NETWORK", f"cannot reach {url}: {exc}") from None


def _scenario_root(tmp: Path) -> Path | None:
    for desc in sorted(tmp.rglob(DESCRIPTION_FILE)):
        return desc.parent
    return None


def _install(src: Path, target: Path):
    if target.exists():
        shutil.rmtree(target)
    shutil.move(str(src), str(target))
    (target / ".complete").write_text("")


def fetch_scenario(name: str, cfg: RepoConfig | None = None) -> Path:
    """Download scenario ``name`` into the cache and return its directory.

    Tries ``<base_url>/<name>.zip`` first (verified against
    ``<name>.zip.sha256`` when that digest file exists), then falls back to
    fetching the directory tree file by file. A completed download is reused
    without touching the network.
    """
    cfg = cfg or RepoConfig()
    if not name or "/" in name or "\\" in name or name.startswith("."):
        raise FetchError("NOT_FOUND", f"invalid scenario name {name!r}")
    target = cfg.cache_dir / name
    if (target / ".complete").exists():
        return target
    cfg.cache_dir.mkdir(parents=True, exist_ok=True)
    base = cfg.base_url.rstrip("/")
    with FileLock(str(cfg.cache_dir / f".{name}.lock")):
        if (target / ".complete").exists():
            return target
        with tempfile.TemporaryDirectory(dir=cfg.cache_dir) as tmpname:
            tmp = Path(tmpname)
            blob = _get(f"{base}/{name}.zip", cfg.timeout)
            if blob is not None:
                digest = _get(f"{base}/{name}.zip.sha256", cfg.timeout)
                if digest is not None:
                    expected = digest.decode("ascii", "replace").split()[0].strip().lower()
                    actual = hashlib.sha256(blob).hexdigest()
                    if expected != actual:
                        raise FetchError("CHECKSUM", f"sha256 mismatch for {name}.zip: {actual} != {expected}")
                try:
                    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
                        for member in zf.namelist():
                            p = Path(member)
                            if p.is_absolute() or ".." in p.parts:
                                raise FetchError("CHECKSUM", f"unsafe path {member!r} in archive")
                        zf.extractall(tmp / "unpacked")
                except zipfile.BadZipFile as exc:
                    raise FetchError("CHECKSUM", f"corrupt archive {name}.zip: {exc}") from None
                root = _scenario_root(tmp / "unpacked")
                if root is None:
                    raise FetchError("NOT_FOUND", f"{name}.zip contains no {DESCRIPTION_FILE}")
                _install(root, target)
                return target
            staging = tmp / name
            staging.mkdir()
            for fname in MANDATORY_FILES + OPTIONAL_FILES:
                data = _get(f"{base}/{name}/{fname}", cfg.timeout)
                if data is None:
                    if fname in MANDATORY_FILES:
                        raise FetchError("NOT_FOUND", f"scenario {name!r} not found ({fname} missing at {base})")
                    continue
                (staging / fname).write_bytes(data)
            _install(staging, target)
    return target
