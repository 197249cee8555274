"""Run manifests and the JSON reports produced by ``cloneembed verify``."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .classify import spoilt_inventory
from .config import Bounds
from .construction import build_system, inject_fault
from .embedding import FAIL, INCONCLUSIVE, PASS, verify_embedding, when4_suite, worst
from .family import independent_family, singleton_family
from .lattice import FIXTURES, FiniteLattice, load_lattice
from .lemmas import construction_suite, run_lemma_suites

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SUITES = ("lemmas", "when4", "embedding")
FAMILIES = ("singleton", "independent")
LEMMA_ARITY = 3


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def resolve_lattice(source: str) -> tuple[str, FiniteLattice]:
    """A fixture name or a path to a lattice JSON file."""
    if source in FIXTURES and not Path(source).exists():
        return source, FIXTURES[source]()
    return str(source), load_lattice(source)


def make_family(strategy: str, n: int):
    if strategy == "singleton":
        return singleton_family(n)
    if strategy == "independent":
        return independent_family(n)
    raise ValueError(f"unknown family strategy {strategy!r}")


@dataclass(frozen=True)
class RunManifest:
    lattice: str
    lattice_sha256: str
    family: str
    family_sha256: str
    bounds: dict
    lemma_bounds: dict
    suites: tuple
    fault: str | None = None
    tool: str = "cloneembed"
    version: str = __version__
    determinism: str = field(
        default="no randomness; enumeration order is fixed, so equal manifests give identical reports"
    )

    def to_json(self) -> dict:
        d = asdict(self)
        d["suites"] = list(self.suites)
        return d


def expand_suites(selector: str) -> tuple:
    if selector == "all":
        return SUITES
    if selector not in SUITES:
        raise ValueError(f"unknown suite {selector!r}")
    return (selector,)


def lemma_bounds_for(bounds: Bounds, explicit_arity: bool) -> Bounds:
    """Lemma suites look at arity 3 unless the caller pinned an arity."""
    if explicit_arity:
        return bounds
    return Bounds(LEMMA_ARITY, bounds.depth, bounds.budget, bounds.work, bounds.representations)


def run(
    lattice_source: str,
    family: str = "singleton",
    suites: str = "all",
    bounds: Bounds | None = None,
    explicit_arity: bool = False,
    fault: str | None = None,
    threads: int | None = None,
) -> dict:
    bounds = bounds or Bounds()
    name, L = resolve_lattice(lattice_source)
    fam = make_family(family, L.size)
    sys = build_system(L, fam)
    fault_info = None
    if fault:
        sys, fault_info = inject_fault(sys, fault)
    lb = lemma_bounds_for(bounds, explicit_arity)
    selected = expand_suites(suites)
    manifest = RunManifest(
        lattice=name,
        lattice_sha256=sha256(L.to_json()),
        family=family,
        family_sha256=sha256(fam.to_json()),
        bounds=bounds.to_json(),
        lemma_bounds=lb.to_json(),
        suites=selected,
        fault=fault,
    )

    results = {"construction": construction_suite(sys)}
    inventory = None
    if "lemmas" in selected:
        log.info("lemma suites on %s", name)
        inventory = spoilt_inventory(sys, lb.max_arity, lb.depth, lb.budget, lb.max_work)
        results["lemmas"] = run_lemma_suites(sys, lb, inventory)
    if "when4" in selected:
        log.info("when4 suite on %s", name)
        results["when4"] = when4_suite(sys, bounds)
    if "embedding" in selected:
        log.info("embedding checks on %s", name)
        if inventory is None or lb.max_arity < bounds.max_arity or lb.depth != bounds.depth:
            inventory = spoilt_inventory(sys, bounds.max_arity, bounds.depth, bounds.budget, bounds.max_work)
        results["embedding"] = verify_embedding(L, sys, bounds, inventory, threads)

    statuses, partial, inconclusive, failed = [], [], [], []
    for key, res in results.items():
        for r in res if isinstance(res, list) else [res]:
            statuses.append(r["status"])
            tag = f"{key}/{r['name']}" if isinstance(res, list) else key
            if r.get("partial"):
                partial.append(tag)
            if r["status"] == INCONCLUSIVE:
                inconclusive.append(tag)
            if r["status"] == FAIL:
                failed.append(tag)
            for c in r.get("checks", []):
                if c["status"] == INCONCLUSIVE:
                    inconclusive.append(f"{tag}/{c['name']}")
                if c["status"] == FAIL:
                    failed.append(f"{tag}/{c['name']}")
    return {
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest.to_json(),
        "manifest_sha256": sha256(manifest.to_json()),
        "fault": fault_info,
        "status": worst(statuses) if statuses else PASS,
        "failed": failed,
        "inconclusive": inconclusive,
        "partial_coverage": partial,
        "suites": results,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
