"""
Configuration documents, run manifests and output serializers.

Configuration documents are YAML with four sections and unit-suffixed keys::

    atom:
      dipole_moment_C_m: 2.1e-29
      number_density_per_m3: 7.0e+19
      probe_wavelength_m: 5.89e-07
      probe_detuning_rad_per_s: 1.3e+06
    probe:
      angular_frequency_rad_per_s: 3.198e+15
      quantization_volume_m3: 1.0e-03
      coherent_amplitude: 629.0        # or intensity_W_per_m2
    coupling:
      angular_frequency_rad_per_s: 3.198e+15
      quantization_volume_m3: 1.0e-03
      intensity_W_per_m2: 400.0
    options:
      strict: false
      large_n_floor: 1000
      detuning_ratio_max: 0.1

Alternatively ``preset: slow_light`` with an optional ``preset_parameters``
mapping selects :func:`eitkerr.presets.slow_light_config`. Unknown keys are
errors.

Three output formats are written, each with a reader that restores the data
exactly (floats are written with ``repr``):

* ``csv``: ``#``-prefixed manifest lines, a header row, comma-separated rows;
* ``json``: ``{"manifest": ..., "report": ...}`` (or ``"columns"``);
* ``table``: the same content as ``csv`` with aligned whitespace columns.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence

import numpy as np
import yaml

from . import __version__
from .errors import ValidationError
from .params import AtomMediumSpec, LaserSpec, amplitude_from_intensity, build_config, per_photon_field
from .presets import slow_light_config

OUTPUT_DIR_ENV = "EITKERR_OUTPUT_DIR"
FORMATS = ("table", "csv", "json")

_ATOM_KEYS = {
    "dipole_moment_C_m": "dipole_moment",
    "number_density_per_m3": "number_density",
    "probe_wavelength_m": "probe_wavelength",
    "probe_detuning_rad_per_s": "probe_detuning",
}
_LASER_KEYS = {
    "angular_frequency_rad_per_s": "angular_frequency",
    "quantization_volume_m3": "quantization_volume",
    "coherent_amplitude": "coherent_amplitude",
}
_OPTION_KEYS = {"strict", "large_n_floor", "detuning_ratio_max"}
_PRESET_PARAMETERS = {
    "coupling_intensity_W_per_m2": "coupling_intensity",
    "detuning_rad_per_s": "detuning",
    "wavelength_m": "wavelength",
    "vg0_m_per_s": "vg0",
    "dipole_moment_C_m": "dipole_moment",
    "quantization_volume_m3": "quantization_volume",
    "probe_fraction": "probe_fraction",
    "ground_splitting_rad_per_s": "ground_splitting",
}


def _number(section, key, value):
    # YAML 1.1 reads 589e-9 (no dot) as a string
    if isinstance(value, bool):
        raise ValidationError(f"{section}.{key} must be a number")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{section}.{key} must be a number, got {value!r}") from None


def _unknown(section, got, allowed):
    extra = sorted(set(got) - set(allowed))
    if extra:
        raise ValidationError(f"unknown keys in {section}: {', '.join(extra)}")


def _laser(section, doc):
    if not isinstance(doc, Mapping):
        raise ValidationError(f"section {section} must be a mapping")
    _unknown(section, doc, list(_LASER_KEYS) + ["intensity_W_per_m2"])
    missing = [k for k in ("angular_frequency_rad_per_s", "quantization_volume_m3") if k not in doc]
    if missing:
        raise ValidationError(f"{section} is missing {', '.join(missing)}")
    has_amp, has_int = "coherent_amplitude" in doc, "intensity_W_per_m2" in doc
    if has_amp == has_int:
        raise ValidationError(f"{section} needs exactly one of coherent_amplitude, intensity_W_per_m2")
    omega = _number(section, "angular_frequency_rad_per_s", doc["angular_frequency_rad_per_s"])
    volume = _number(section, "quantization_volume_m3", doc["quantization_volume_m3"])
    if has_amp:
        amp = _number(section, "coherent_amplitude", doc["coherent_amplitude"])
    else:
        intensity = _number(section, "intensity_W_per_m2", doc["intensity_W_per_m2"])
        if omega <= 0 or volume <= 0:
            raise ValidationError(f"{section}: frequency and volume must be positive")
        amp = amplitude_from_intensity(per_photon_field(omega, volume), intensity)
    return LaserSpec(omega, volume, amp)


def config_from_dict(doc: Mapping):
    """Build a :class:`~eitkerr.params.SystemConfig` from a parsed document."""
    if not isinstance(doc, Mapping):
        raise ValidationError("configuration document must be a mapping")
    options = doc.get("options", {}) or {}
    if not isinstance(options, Mapping):
        raise ValidationError("options must be a mapping")
    _unknown("options", options, _OPTION_KEYS)
    opts = {}
    if "strict" in options:
        if not isinstance(options["strict"], bool):
            raise ValidationError("options.strict must be true or false")
        opts["strict"] = options["strict"]
    for key in ("large_n_floor", "detuning_ratio_max"):
        if key in options:
            opts[key] = _number("options", key, options[key])

    if "preset" in doc:
        _unknown("document", doc, ["preset", "preset_parameters", "options"])
        if doc["preset"] != "slow_light":
            raise ValidationError(f"unknown preset {doc['preset']!r}")
        params = doc.get("preset_parameters", {}) or {}
        _unknown("preset_parameters", params, _PRESET_PARAMETERS)
        kwargs = {_PRESET_PARAMETERS[k]: _number("preset_parameters", k, v)
                  for k, v in params.items()}
        return slow_light_config(**kwargs, **opts)

    _unknown("document", doc, ["atom", "probe", "coupling", "options"])
    for section in ("atom", "probe", "coupling"):
        if section not in doc:
            raise ValidationError(f"missing section {section}")
    atom_doc = doc["atom"]
    if not isinstance(atom_doc, Mapping):
        raise ValidationError("section atom must be a mapping")
    _unknown("atom", atom_doc, _ATOM_KEYS)
    missing = sorted(set(_ATOM_KEYS) - set(atom_doc))
    if missing:
        raise ValidationError(f"atom is missing {', '.join(missing)}")
    atom = AtomMediumSpec(**{_ATOM_KEYS[k]: _number("atom", k, v) for k, v in atom_doc.items()})
    return build_config(atom, _laser("probe", doc["probe"]), _laser("coupling", doc["coupling"]),
                        **opts)


def load_config(path):
    """Read a YAML configuration document."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from None
    return config_from_dict(doc or {})


def config_to_dict(config) -> dict:
    """Document that :func:`config_from_dict` maps back to ``config``."""
    return {
        "atom": {
            "dipole_moment_C_m": config.atom.dipole_moment,
            "number_density_per_m3": config.atom.number_density,
            "probe_wavelength_m": config.atom.probe_wavelength,
            "probe_detuning_rad_per_s": config.atom.probe_detuning,
        },
        "probe": {
            "angular_frequency_rad_per_s": config.probe.angular_frequency,
            "quantization_volume_m3": config.probe.quantization_volume,
            "coherent_amplitude": config.probe.coherent_amplitude,
        },
        "coupling": {
            "angular_frequency_rad_per_s": config.coupling.angular_frequency,
            "quantization_volume_m3": config.coupling.quantization_volume,
            "coherent_amplitude": config.coupling.coherent_amplitude,
        },
        "options": {
            "strict": config.strict,
            "large_n_floor": config.large_n_floor,
            "detuning_ratio_max": config.detuning_ratio_max,
        },
    }


# ---------------------------------------------------------------------------
# manifest

def config_hash(config) -> str:
    blob = json.dumps(config.as_dict(), sort_keys=True, default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp for reproducible output files
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        moment = _dt.datetime.now(tz=_dt.timezone.utc).replace(microsecond=0)
    return moment.isoformat()


@dataclass(frozen=True)
class RunManifest:
    config_hash: str
    code_version: str
    timestamp: str
    command: str
    parameters: Dict[str, object]

    @classmethod
    def for_config(cls, config, command: str, extra: Optional[Mapping] = None) -> "RunManifest":
        params = dict(config.as_dict())
        if extra:
            params.update(extra)
        return cls(config_hash(config), __version__, _timestamp(), command, params)

    def as_dict(self) -> dict:
        return {"config_hash": self.config_hash, "code_version": self.code_version,
                "timestamp": self.timestamp, "command": self.command,
                "parameters": self.parameters}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RunManifest":
        return cls(doc["config_hash"], doc["code_version"], doc["timestamp"], doc["command"],
                   dict(doc["parameters"]))


# ---------------------------------------------------------------------------
# serializers

def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        if any(ch in value for ch in ", \t\n") or value == "":
            raise ValidationError(f"cannot write string cell {value!r}")
        return value
    raise ValidationError(f"cannot write cell of type {type(value).__name__}")


def _parse_cell(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _manifest_lines(manifest: RunManifest):
    return ["# " + json.dumps(manifest.as_dict(), sort_keys=True, default=_json_default)]


def _json_default(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, complex):
        return {"real": value.real, "imag": value.imag}
    return repr(value)


def format_columns(manifest: RunManifest, columns: Mapping[str, Sequence], fmt: str = "csv") -> str:
    """Render named columns of equal length in ``csv``, ``table`` or ``json`` format."""
    names = list(columns)
    lengths = {len(columns[n]) for n in names}
    if len(lengths) > 1:
        raise ValidationError("columns must have equal length")
    if fmt == "json":
        cols = {n: [_parse_cell(_cell(v)) for v in columns[n]] for n in names}
        return json.dumps({"manifest": manifest.as_dict(), "columns": cols},
                          indent=2, sort_keys=False, default=_json_default) + "\n"
    rows = [[_cell(v) for v in row] for row in zip(*(columns[n] for n in names))]
    lines = _manifest_lines(manifest)
    if fmt == "csv":
        lines.append(",".join(names))
        lines += [",".join(r) for r in rows]
    elif fmt == "table":
        widths = [max([len(n)] + [len(r[i]) for r in rows]) for i, n in enumerate(names)]
        lines.append("  ".join(n.ljust(w) for n, w in zip(names, widths)).rstrip())
        lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    return "\n".join(lines) + "\n"


def format_report(manifest: RunManifest, report: Mapping[str, object], fmt: str = "json") -> str:
    """Render a flat key/value report."""
    if fmt == "json":
        return json.dumps({"manifest": manifest.as_dict(), "report": dict(report)},
                          indent=2, default=_json_default) + "\n"
    return format_columns(manifest, {"key": list(report), "value": list(report.values())}, fmt)


def parse_output(text: str):
    """
    Parse any emitted document.

    Returns ``(manifest, data)`` where ``data`` is a dict of column lists for
    columnar documents or the report mapping for key/value documents.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        manifest = RunManifest.from_dict(doc["manifest"])
        if "report" in doc:
            return manifest, doc["report"]
        return manifest, doc["columns"]
    lines = text.splitlines()
    meta = [ln for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    if not meta or not body:
        raise ValidationError("not an eitkerr output document")
    manifest = RunManifest.from_dict(json.loads(meta[0][2:]))
    split = (lambda ln: ln.split(",")) if "," in body[0] else (lambda ln: ln.split())
    names = split(body[0])
    cols = {n: [] for n in names}
    for ln in body[1:]:
        cells = split(ln)
        if len(cells) != len(names):
            raise ValidationError(f"row has {len(cells)} cells, expected {len(names)}")
        for n, c in zip(names, cells):
            cols[n].append(_parse_cell(c))
    if names == ["key", "value"]:
        return manifest, dict(zip(cols["key"], cols["value"]))
    return manifest, cols


def read_output(path):
    return parse_output(Path(path).read_text())


def resolve_output_path(path) -> Path:
    """Relative paths are placed under ``$EITKERR_OUTPUT_DIR`` when it is set."""
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def write_text(path, text: str) -> Path:
    path = resolve_output_path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def trajectory_columns(trajectory) -> Dict[str, np.ndarray]:
    """Columns (time, populations, coherence) for a single-manifold trajectory."""
    pops = trajectory.populations
    coh = trajectory.coherence
    return {"time_s": trajectory.times, "pop_1": pops[:, 0], "pop_2": pops[:, 1],
            "pop_3": pops[:, 2], "coherence_re": coh.real, "coherence_im": coh.imag}


def ensemble_history_columns(history) -> Dict[str, np.ndarray]:
    """Ensemble-averaged |2> population per step."""
    return {"time_s": history.times, "pop_2": history.total_upper_population}
