"""Experiment configs: flat `key = value` text or a flat JSON object.

Both encodings share one schema per scenario. `load` only parses;
`validate` type-checks, applies defaults and re-checks the module
invariants (positivity, kappa = 4*alpha*nu*m, mandatory seed) without
running any numerics.
"""

import json
from pathlib import Path


class ConfigError(ValueError):
    pass


def load(path) -> dict:
    """Parse a config file into a flat {key: raw value} dict."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be a flat object")
        return dict(data)
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        out[key.strip()] = _coerce_literal(raw.strip())
    return out


def _coerce_literal(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


class Field:
    def __init__(self, typ, default=None, required=False, positive=False, minimum=None):
        self.typ = typ
        self.default = default
        self.required = required
        self.positive = positive
        self.minimum = minimum

    def check(self, name, value, errors):
        if self.typ is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, self.typ) or isinstance(value, bool) and self.typ is not bool:
            errors.append(f"{name}: expected {self.typ.__name__}, got {value!r}")
            return value
        if self.positive and value <= 0:
            errors.append(f"{name}: must be positive (invariant), got {value!r}")
        if self.minimum is not None and value < self.minimum:
            errors.append(f"{name}: must be >= {self.minimum}, got {value!r}")
        return value


def validate(cfg: dict, schemas: dict) -> tuple[dict, list[str]]:
    """Return (normalized config, diagnostics). Empty diagnostics == valid."""
    errors = []
    scenario = cfg.get("scenario")
    if scenario is None:
        errors.append("scenario: missing (choose one of: " + ", ".join(sorted(schemas)) + ")")
        return {}, errors
    if scenario not in schemas:
        errors.append(f"scenario: unknown {scenario!r} (choose one of: " + ", ".join(sorted(schemas)) + ")")
        return {}, errors
    schema = schemas[scenario]
    out = {"scenario": scenario}
    for name, spec in schema.items():
        if name in cfg:
            out[name] = spec.check(name, cfg[name], errors)
        elif spec.required:
            errors.append(f"{name}: missing required field")
        elif spec.default is not None:
            out[name] = spec.default
    for key in cfg:
        if key != "scenario" and key not in schema:
            errors.append(f"{key}: unknown key for scenario {scenario}")

    # cross-field invariants
    if not errors and {"steps", "snapshot_every"} <= out.keys():
        if out["steps"] % out["snapshot_every"] != 0:
            errors.append(
                f"steps: must be a multiple of snapshot_every "
                f"({out['steps']} % {out['snapshot_every']} != 0)"
            )
    if not errors and {"kappa", "alpha", "m"} <= out.keys():
        if "nu" not in out or out["nu"] is None:
            out["nu"] = out["kappa"] / (4.0 * out["alpha"] * out["m"])
        expected = 4.0 * out["alpha"] * out["nu"] * out["m"]
        if abs(out["kappa"] - expected) > 1e-12 * out["kappa"]:
            errors.append(
                f"kappa: constraint kappa = 4*alpha*nu*m violated "
                f"({out['kappa']} != {expected})"
            )
    return out, errors
