"""
Run manifests: the parameters, content hash, calibrated bands and results of
a CLI run, stored as JSON.

Bands are keyed by the content hash of the canonical parameters, so one
manifest file can hold calibrations for several parameter sets.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .utils import get_logger

logger = get_logger(__name__)

MANIFEST_VERSION = 1
DEFAULT_BAND_MARGIN = 0.05


@dataclass(frozen=True)
class BandViolation:
    """An observed quantity that fell outside its calibrated band."""

    quantity: str
    observed: float
    band: tuple[float, float]

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "observed": self.observed, "band": list(self.band)}


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)


def content_hash(params: dict) -> str:
    """Git blob sha1 of the canonical JSON of the parameters."""
    payload = canonical_json(params).encode("utf-8")
    header = f"blob {len(payload)}\0".encode("ascii")
    return hashlib.sha1(header + payload).hexdigest()


@dataclass
class RunManifest:
    command: str
    params: dict
    input_hash: str
    bands: dict[str, dict[str, list[float]]] = field(default_factory=dict)
    timestamp: str = ""
    results: dict = field(default_factory=dict)
    version: int = MANIFEST_VERSION

    @classmethod
    def create(cls, command: str, params: dict, results: dict | None = None,
               bands: dict | None = None) -> "RunManifest":
        return cls(
            command=command,
            params=dict(params),
            input_hash=content_hash({"command": command, **params}),
            bands=dict(bands or {}),
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            results=dict(results or {}),
        )

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True, default=str) + "\n",
                        encoding="utf-8")
        logger.info(f"Wrote manifest {path}")

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        """
        Read a manifest written by save().

        Raises:
            ValueError: If the file is not a manifest
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValueError(f"{path} is not valid JSON: {e}")
        missing = {"command", "params", "input_hash"} - set(data)
        if missing:
            raise ValueError(f"{path} is missing manifest fields {sorted(missing)}")
        if data.get("version", MANIFEST_VERSION) != MANIFEST_VERSION:
            raise ValueError(f"unsupported manifest version {data['version']}")
        return cls(**data)

    def band_for(self, key: str, quantity: str = "ratio") -> tuple[float, float] | None:
        band = self.bands.get(key, {}).get(quantity)
        return (band[0], band[1]) if band else None

    def record_band(self, key: str, observed: float, quantity: str = "ratio",
                    margin: float = DEFAULT_BAND_MARGIN) -> tuple[float, float]:
        """Store [observed - margin|observed|, observed + margin|observed|] as the band."""
        spread = abs(observed) * margin
        band = [observed - spread, observed + spread]
        self.bands.setdefault(key, {})[quantity] = band
        logger.info(f"Calibrated {quantity} band for {key[:12]}: [{band[0]:.6g}, {band[1]:.6g}]")
        return band[0], band[1]

    def check(self, key: str, value: float, quantity: str = "ratio") -> bool | None:
        """True/False against the stored band; None when nothing is calibrated."""
        band = self.band_for(key, quantity)
        if band is None:
            return None
        inside = band[0] <= value <= band[1]
        if not inside:
            logger.warning(f"{quantity}={value:.6g} outside band [{band[0]:.6g}, {band[1]:.6g}]")
        return inside

    def violations(self, key: str, observed: dict[str, float]) -> list[BandViolation]:
        """Every observed quantity outside its calibrated band, in input order."""
        found = []
        for quantity, value in observed.items():
            if self.check(key, value, quantity) is False:
                found.append(BandViolation(quantity, value, self.band_for(key, quantity)))
        return found
