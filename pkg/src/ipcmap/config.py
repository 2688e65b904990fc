"""Pipeline configuration: TOML file plus command-line overrides."""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .corpus import FORMATS
from .export import EXPORT_FORMATS
from .ipc import IpcLevel
from .layout import LayoutParams

__all__ = ["ConfigError", "PipelineConfig", "DEFAULT_APPLICANTS", "DEFAULT_APPLICANT_RULES", "load_config"]

# Applicant OR-list of the Activision Blizzard Patentscope query.
DEFAULT_APPLICANTS = (
    "activision blizzard",
    "activision publishing",
    "blizzard entertainment",
    "king.com",
    "activision shanghai",
    "beenox",
    "blizzard albany",
    "demonware",
    "digital legends entertainment",
    "high moon studios",
    "infinity ward",
    "neversoft entertainment",
    "raven software",
    "redoctane",
    "sledgehammer games",
    "solid state studios",
    "toys for bob",
    "treyarch",
    "vicarious visions",
)

DEFAULT_APPLICANT_RULES = (
    ("Activision Publishing", ("activision publishing",)),
    ("King.com", ("king.com",)),
    ("Blizzard Entertainment", ("blizzard entertainment",)),
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    input: str = ""
    input_format: str = "canonical-csv"
    columns: Mapping[str, str] = field(default_factory=dict)
    applicant_patterns: tuple[str, ...] = DEFAULT_APPLICANTS
    applicant_rules: tuple[tuple[str, tuple[str, ...]], ...] = DEFAULT_APPLICANT_RULES
    from_year: int | None = 2008
    to_year: int | None = 2023
    level: str = "subclass"
    min_occurrence: int = 2
    jaccard_threshold: float = 0.05
    resolution: float = 1.0
    seed: int = 0
    use_weights: bool = False
    layout: LayoutParams = field(default_factory=LayoutParams)
    output_dir: str = "out"
    formats: tuple[str, ...] = ("graphml", "gexf", "csv-edgelist")
    label_min_occurrence: int = 50
    prolific_threshold: int = 50
    top_k: int = 10
    expected: str | None = None

    def __post_init__(self):
        self.validate()

    @property
    def ipc_level(self) -> IpcLevel:
        return IpcLevel.parse(self.level)

    def validate(self) -> None:
        if self.input_format not in FORMATS:
            raise ConfigError(f"input_format must be one of {', '.join(FORMATS)}")
        try:
            IpcLevel.parse(self.level)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.min_occurrence < 1:
            raise ConfigError("min_occurrence must be >= 1")
        if not 0 <= self.jaccard_threshold <= 1:
            raise ConfigError(f"jaccard_threshold must lie in [0, 1], got {self.jaccard_threshold}")
        if self.from_year is not None and self.to_year is not None and self.from_year > self.to_year:
            raise ConfigError("from_year must not exceed to_year")
        if self.resolution <= 0:
            raise ConfigError("resolution must be > 0")
        bad = [f for f in self.formats if f not in EXPORT_FORMATS]
        if bad:
            raise ConfigError(f"unsupported output formats: {', '.join(bad)}")
        if self.label_min_occurrence < 0 or self.prolific_threshold < 1 or self.top_k < 0:
            raise ConfigError("label_min_occurrence >= 0, prolific_threshold >= 1 and top_k >= 0 required")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["columns"] = dict(self.columns)
        return d


def _coerce(raw: Mapping[str, Any]) -> dict:
    names = {f.name for f in fields(PipelineConfig)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = dict(raw)
    if "layout" in out and not isinstance(out["layout"], LayoutParams):
        try:
            out["layout"] = LayoutParams(**out["layout"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid layout settings: {exc}") from None
    if "applicant_patterns" in out:
        out["applicant_patterns"] = tuple(out["applicant_patterns"])
    if "applicant_rules" in out:
        rules = out["applicant_rules"]
        if isinstance(rules, Mapping):
            rules = list(rules.items())
        else:
            rules = [(r["label"], r["patterns"]) if isinstance(r, Mapping) else r for r in rules]
        out["applicant_rules"] = tuple((str(label), tuple(p)) for label, p in rules)
    if "formats" in out:
        out["formats"] = tuple(out["formats"])
    return out


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> PipelineConfig:
    """Defaults, then the TOML file (if any), then non-None ``overrides``."""
    raw: dict = {}
    if path is not None:
        path = Path(path)
        try:
            raw = tomllib.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {str(path)!r}: {exc}") from None
        # Relative input paths are resolved against the config file's directory.
        if raw.get("input") and not Path(raw["input"]).is_absolute():
            raw["input"] = str(path.parent / raw["input"])
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    layout_over = {k[len("layout_"):]: overrides.pop(k) for k in list(overrides) if k.startswith("layout_")}
    raw.update(overrides)
    if layout_over:
        base = raw.get("layout", {})
        base = asdict(base) if isinstance(base, LayoutParams) else dict(base)
        base.update(layout_over)
        raw["layout"] = base
    try:
        return PipelineConfig(**_coerce(raw))
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def with_level(config: PipelineConfig, level: str) -> PipelineConfig:
    return replace(config, level=level)
