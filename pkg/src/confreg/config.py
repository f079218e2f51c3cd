"""Experiment configuration: parsing, validation, canonical form, digest.

Config files are JSON. Numeric fields are written as decimal strings
("0.05" rather than 0.05) so a file round-trips byte-identically through
parsers that disagree about float formatting; plain JSON numbers are also
accepted on input. Command-line flags override file values field by field.

The canonical form (sorted keys, decimal-string numerics, defaults filled
in) feeds a SHA-256 digest used to tag report file names. The seed is left
out of the digest so runs that differ only by seed group under one tag; the
seed appears in file names separately.
"""

import hashlib
import json
import math
from dataclasses import dataclass

from .exceptions import ConfigError
from .models import GaussianLocationModel, TwoPointGaussianModel
from .regions import (
    BayesCredibleEstimator,
    DegenerateEstimator,
    FiducialEstimator,
    FiducialIntervalEstimator,
    FlatPriorIntervalEstimator,
    ImprovedEstimator,
    RegionSpec,
)

MAX_SEED = 2**64 - 1

MODEL_KINDS = ("two_point", "location")
ESTIMATOR_KINDS = ("fiducial", "improved", "degenerate", "bayes", "flat_prior")
FORMATS = ("json", "csv", "text")
SWEEP_AXES = ("delta", "sigma0", "sigma1")


def parse_decimal(value, name):
    """Read a float from a decimal string or a JSON number."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be numeric, got boolean {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(value.strip())
        except ValueError:
            raise ConfigError(f"{name} is not a decimal value: {value!r}") from None
    else:
        raise ConfigError(f"{name} must be a number or decimal string, got {value!r}")
    if math.isnan(out):
        raise ConfigError(f"{name} must not be NaN")
    return out


def parse_count(value, name, minimum=1):
    """Read a nonnegative integer from an int or digit string."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer, got boolean {value!r}")
    if isinstance(value, int):
        out = value
    elif isinstance(value, str):
        try:
            out = int(value.strip(), 10)
        except ValueError:
            raise ConfigError(f"{name} is not an integer: {value!r}") from None
    elif isinstance(value, float) and value.is_integer():
        out = int(value)
    else:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if out < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {out}")
    return out


def parse_seed(value):
    seed = parse_count(value, "seed", minimum=0)
    if seed > MAX_SEED:
        raise ConfigError(f"seed must fit in 64 bits, got {seed}")
    return seed


def _decimal_str(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ModelSpec:
    """Which observation model to build, with its scale parameters."""

    kind: str
    sigma0: float = None
    sigma1: float = None
    sigma: float = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"model kind must be one of {MODEL_KINDS}, got {self.kind!r}")
        if self.kind == "two_point":
            if self.sigma0 is None or self.sigma1 is None:
                raise ConfigError("two_point model needs sigma0 and sigma1")
        else:
            if self.sigma is None:
                raise ConfigError("location model needs sigma")

    def build(self):
        if self.kind == "two_point":
            return TwoPointGaussianModel(sigma0=self.sigma0, sigma1=self.sigma1)
        return GaussianLocationModel(sigma=self.sigma)

    def to_mapping(self):
        out = {"kind": self.kind}
        if self.kind == "two_point":
            out["sigma0"] = _decimal_str(self.sigma0)
            out["sigma1"] = _decimal_str(self.sigma1)
        else:
            out["sigma"] = _decimal_str(self.sigma)
        return out


@dataclass(frozen=True)
class EstimatorSpec:
    """One estimator to evaluate; prior1/level apply to the bayes kind only."""

    kind: str
    prior1: float = 0.5
    level: float = 0.9

    def __post_init__(self):
        if self.kind not in ESTIMATOR_KINDS:
            raise ConfigError(
                f"estimator kind must be one of {ESTIMATOR_KINDS}, got {self.kind!r}"
            )

    def build(self, model, band: RegionSpec, delta):
        if self.kind == "fiducial":
            if isinstance(model, GaussianLocationModel):
                return FiducialIntervalEstimator(model, band)
            return FiducialEstimator(model, band)
        if self.kind == "improved":
            if not isinstance(model, TwoPointGaussianModel):
                raise ConfigError("improved estimator requires the two_point model")
            if delta is None:
                raise ConfigError("improved estimator requires the delta band form")
            return ImprovedEstimator(model, delta)
        if self.kind == "degenerate":
            return DegenerateEstimator(band, model.parameter_space())
        if self.kind == "bayes":
            if not isinstance(model, TwoPointGaussianModel):
                raise ConfigError("bayes estimator requires the two_point model")
            return BayesCredibleEstimator(model, self.prior1, self.level)
        if not isinstance(model, GaussianLocationModel):
            raise ConfigError("flat_prior estimator requires the location model")
        return FlatPriorIntervalEstimator(model, band)

    def to_mapping(self):
        out = {"kind": self.kind}
        if self.kind == "bayes":
            out["prior1"] = _decimal_str(self.prior1)
            out["level"] = _decimal_str(self.level)
        return out


@dataclass(frozen=True)
class SweepSpec:
    """Axis and values for the sweep command."""

    axis: str
    values: tuple

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")

    def to_mapping(self):
        return {"axis": self.axis, "values": [_decimal_str(v) for v in self.values]}


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    estimators: tuple
    delta: float
    alpha: float
    beta: float
    thetas: tuple
    n: int
    seed: int
    out_format: str
    sweep: SweepSpec = None

    def __post_init__(self):
        if self.delta is not None and (self.alpha is not None or self.beta is not None):
            raise ConfigError("delta and (alpha, beta) are mutually exclusive")
        if (self.alpha is None) != (self.beta is None):
            raise ConfigError("alpha and beta must be given together")
        if self.delta is None and self.alpha is None:
            raise ConfigError("a band is required: give delta or both alpha and beta")
        if self.out_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.out_format!r}")
        if not self.estimators:
            raise ConfigError("at least one estimator is required")
        if not self.thetas:
            raise ConfigError("at least one theta value is required")

    def band(self) -> RegionSpec:
        if self.delta is not None:
            return RegionSpec.from_delta(self.delta)
        return RegionSpec(self.alpha, self.beta)

    def build_model(self):
        return self.model.build()

    def build_estimators(self, model):
        band = self.band()
        return tuple(spec.build(model, band, self.delta) for spec in self.estimators)

    def to_mapping(self):
        """Canonical nested mapping with decimal-string numerics."""
        out = {
            "model": self.model.to_mapping(),
            "estimators": [spec.to_mapping() for spec in self.estimators],
            "thetas": [_decimal_str(t) for t in self.thetas],
            "n": self.n,
            "seed": self.seed,
            "format": self.out_format,
        }
        if self.delta is not None:
            out["delta"] = _decimal_str(self.delta)
        else:
            out["alpha"] = _decimal_str(self.alpha)
            out["beta"] = _decimal_str(self.beta)
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_mapping()
        return out

    def digest(self):
        """Hex digest of the canonical mapping, seed excluded."""
        mapping = self.to_mapping()
        mapping.pop("seed", None)
        blob = json.dumps(mapping, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


_KNOWN_KEYS = {
    "model",
    "estimators",
    "delta",
    "alpha",
    "beta",
    "thetas",
    "n",
    "seed",
    "format",
    "sweep",
}


def load_config_file(path):
    """Read a JSON config file into a raw mapping."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return raw


def _parse_model(raw):
    if raw is None:
        return ModelSpec(kind="two_point", sigma0=10.0, sigma1=0.1)
    if not isinstance(raw, dict):
        raise ConfigError(f"model must be an object, got {raw!r}")
    kind = raw.get("kind", "two_point")
    if kind == "two_point":
        return ModelSpec(
            kind=kind,
            sigma0=parse_decimal(raw.get("sigma0", "10"), "sigma0"),
            sigma1=parse_decimal(raw.get("sigma1", "0.1"), "sigma1"),
        )
    if kind == "location":
        return ModelSpec(kind=kind, sigma=parse_decimal(raw.get("sigma", "1"), "sigma"))
    raise ConfigError(f"model kind must be one of {MODEL_KINDS}, got {kind!r}")


def _parse_estimators(raw, model_kind):
    if raw is None:
        if model_kind == "two_point":
            return (
                EstimatorSpec("fiducial"),
                EstimatorSpec("improved"),
                EstimatorSpec("degenerate"),
            )
        return (EstimatorSpec("fiducial"), EstimatorSpec("flat_prior"))
    if not isinstance(raw, list):
        raise ConfigError(f"estimators must be a list, got {raw!r}")
    specs = []
    for item in raw:
        if isinstance(item, str):
            specs.append(EstimatorSpec(kind=item))
        elif isinstance(item, dict):
            kind = item.get("kind")
            spec = EstimatorSpec(
                kind=kind,
                prior1=parse_decimal(item.get("prior1", "0.5"), "prior1"),
                level=parse_decimal(item.get("level", "0.9"), "level"),
            )
            specs.append(spec)
        else:
            raise ConfigError(f"estimator entry must be a name or object, got {item!r}")
    return tuple(specs)


def _parse_thetas(raw, model_kind):
    if raw is None:
        return (0, 1) if model_kind == "two_point" else (0.0,)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"thetas must be a nonempty list, got {raw!r}")
    if model_kind == "two_point":
        labels = []
        for item in raw:
            value = parse_decimal(item, "theta")
            if value not in (0.0, 1.0):
                raise ConfigError(f"two_point theta must be 0 or 1, got {item!r}")
            labels.append(int(value))
        return tuple(labels)
    return tuple(parse_decimal(item, "theta") for item in raw)


def _parse_sweep(raw):
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError(f"sweep must be an object, got {raw!r}")
    values = raw.get("values")
    if not isinstance(values, list):
        raise ConfigError("sweep.values must be a list")
    return SweepSpec(
        axis=raw.get("axis", "delta"),
        values=tuple(parse_decimal(v, "sweep value") for v in values),
    )


def config_from_mapping(raw, overrides=None, default_seed=1):
    """Build an ExperimentConfig from a raw mapping plus flag overrides.

    `overrides` maps the flat flag names (seed, n, delta, alpha, beta,
    sigma0, sigma1, format) to already-parsed values; entries set to None
    are ignored. A band override (delta or alpha/beta) replaces the file's
    band entirely, so a delta flag can override an alpha/beta file.
    `default_seed` is used when neither flag nor file provides one (the CLI
    passes the environment fallback here).
    """
    raw = dict(raw or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    model_raw = raw.get("model")
    for key in ("sigma0", "sigma1", "sigma"):
        if key in overrides:
            model_raw = dict(model_raw or {"kind": "two_point"})
            model_raw[key] = overrides[key]
    model = _parse_model(model_raw)

    delta = raw.get("delta")
    alpha = raw.get("alpha")
    beta = raw.get("beta")
    if "delta" in overrides:
        delta, alpha, beta = overrides["delta"], None, None
    if "alpha" in overrides or "beta" in overrides:
        if "delta" in overrides:
            raise ConfigError("give either --delta or --alpha/--beta, not both")
        delta = None
        alpha = overrides.get("alpha", alpha)
        beta = overrides.get("beta", beta)
    if delta is None and alpha is None and beta is None:
        delta = "0.05"

    seed = overrides.get("seed", raw.get("seed"))
    n = overrides.get("n", raw.get("n", 100_000))
    out_format = overrides.get("format", raw.get("format", "json"))

    return ExperimentConfig(
        model=model,
        estimators=_parse_estimators(raw.get("estimators"), model.kind),
        delta=None if delta is None else parse_decimal(delta, "delta"),
        alpha=None if alpha is None else parse_decimal(alpha, "alpha"),
        beta=None if beta is None else parse_decimal(beta, "beta"),
        thetas=_parse_thetas(raw.get("thetas"), model.kind),
        n=parse_count(n, "n", minimum=1),
        seed=parse_seed(seed if seed is not None else default_seed),
        out_format=str(out_format),
        sweep=_parse_sweep(raw.get("sweep")),
    )
