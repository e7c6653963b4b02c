"""Run configuration: TOML parsing, schema validation, normalization, and
assembly of a ready-to-integrate system from a validated config.

A config file has sections ``[run]``, ``[params]``, ``[integrator]``,
``[initial]``, ``[output]`` and optionally ``[sweep]``.  Unknown sections or
keys are rejected by name.  ``normalize`` fills every default and dumps the
result back as TOML; normalization is idempotent.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import circle, sphere, torus
from .core import FlowSystem, extend_central, extended_state
from .errors import ConfigError
from .integrators import SCHEMES, IntegratorConfig
from .snapshots import read_snapshot

CIRCLE_SYSTEMS = ("burgers", "kdv", "ch", "gch")
SYSTEMS = CIRCLE_SYSTEMS + ("qg", "ic")


# ---------------------------------------------------------------------------
# Schema tables: section -> key -> (type, default or REQUIRED)
# ---------------------------------------------------------------------------

_REQUIRED = object()

_NUM = (int, float)

_RUN_KEYS = {
    "system": (str, _REQUIRED),
    "seed": (int, 0),
}

_INTEGRATOR_KEYS = {
    "scheme": (str, None),  # default depends on the system
    "dt": (_NUM, 1e-3),
    "t_end": (_NUM, 1.0),
    "monitor_stride": (int, 1),
}

_OUTPUT_KEYS = {
    "csv": (str, "diagnostics.csv"),
    "snapshot_times": (list, []),
    "snapshot_prefix": (str, "snapshot"),
    "figures": (bool, True),
}

_SWEEP_KEYS = {
    "parameter": (str, _REQUIRED),
    "values": (list, _REQUIRED),
}

_PARAM_KEYS = {
    "burgers": {
        "alpha": (_NUM, 1.0), "beta": (_NUM, 0.0), "a": (_NUM, 0.0),
        "K": (int, 128), "period": (_NUM, 2.0 * np.pi), "dealias": (bool, True),
    },
    "kdv": {
        "alpha": (_NUM, 1.0), "beta": (_NUM, 0.0), "a": (_NUM, 1.0),
        "K": (int, 128), "period": (_NUM, 2.0 * np.pi), "dealias": (bool, True),
    },
    "ch": {
        "alpha": (_NUM, 1.0), "beta": (_NUM, 1.0), "a": (_NUM, 0.0),
        "K": (int, 128), "period": (_NUM, 2.0 * np.pi), "dealias": (bool, True),
    },
    "gch": {
        "alpha": (_NUM, 1.0), "beta": (_NUM, 1.0), "a": (_NUM, 1.0),
        "K": (int, 128), "period": (_NUM, 2.0 * np.pi), "dealias": (bool, True),
    },
    "qg": {
        "gamma": (_NUM, 1.0), "Ro": (_NUM, 1.0), "a": (_NUM, 1.0),
        "lmax": (int, 42), "topography": (str, "zero"),
        "topography_amplitude": (_NUM, 0.1), "radius_factor": (_NUM, 1.0),
        "phi_topography_over_Ro": (bool, False),
    },
    "ic": {
        "a": (_NUM, 1.0), "K": (int, 16), "B": (list, [0.0, 0.0, 1.0]),
        "dealias": (bool, True),
    },
}

_INITIAL_KEYS = {
    "preset": (str, None),  # default depends on the system
    "file": (str, None),
    "amplitude": (_NUM, 0.2),
    "mode": (int, 1),
    "bandwidth": (int, 5),
    "l": (int, 4),
    "m": (int, 3),
}

_DEFAULT_INITIAL_PRESET = {
    "burgers": "cosine", "kdv": "cosine", "ch": "cosine", "gch": "cosine",
    "qg": "random", "ic": "shear",
}

_INITIAL_PRESETS = {
    "burgers": ("cosine", "constant", "random"),
    "kdv": ("cosine", "constant", "random"),
    "ch": ("cosine", "constant", "random"),
    "gch": ("cosine", "constant", "random"),
    "qg": ("harmonic", "random", "zonal"),
    "ic": ("shear", "random"),
}


def _base_system(system: str) -> str:
    if system.startswith("extended:"):
        return system[len("extended:"):]
    return system


def _check_section(table: dict, schema: dict, section: str) -> dict:
    out = {}
    for key, value in table.items():
        if value is None:
            # unset optional key from an echoed config; defaults apply
            continue
        if key not in schema:
            raise ConfigError(
                f"unknown key {key!r} in [{section}]", kind="unknown-key", key=key
            )
        want, _ = schema[key]
        if want is _NUM:
            ok = isinstance(value, _NUM) and not isinstance(value, bool)
        elif want is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, want)
        if not ok:
            raise ConfigError(
                f"[{section}].{key}: expected {getattr(want, '__name__', 'number')},"
                f" got {value!r}", kind="schema", key=key,
            )
        out[key] = value
    for key, (_, default) in schema.items():
        if key not in out:
            if default is _REQUIRED:
                raise ConfigError(
                    f"missing required key {key!r} in [{section}]",
                    kind="schema", key=key,
                )
            out[key] = copy.deepcopy(default)
    return out


def _validate(raw: dict) -> dict:
    known_sections = {"run", "params", "integrator", "initial", "output", "sweep"}
    for section in raw:
        if section not in known_sections:
            raise ConfigError(
                f"unknown section [{section}]", kind="unknown-key", key=section
            )
        if not isinstance(raw[section], dict):
            raise ConfigError(f"[{section}] must be a table", kind="schema")

    cfg = {"run": _check_section(raw.get("run", {}), _RUN_KEYS, "run")}
    system = cfg["run"]["system"]
    base = _base_system(system)
    if base not in SYSTEMS:
        raise ConfigError(
            f"unknown system {system!r} (expected one of {', '.join(SYSTEMS)},"
            " optionally prefixed with 'extended:')",
            kind="schema", key="system",
        )

    cfg["params"] = _check_section(raw.get("params", {}), _PARAM_KEYS[base], "params")
    cfg["integrator"] = _check_section(
        raw.get("integrator", {}), _INTEGRATOR_KEYS, "integrator"
    )
    cfg["initial"] = _check_section(raw.get("initial", {}), _INITIAL_KEYS, "initial")
    cfg["output"] = _check_section(raw.get("output", {}), _OUTPUT_KEYS, "output")
    if "sweep" in raw:
        cfg["sweep"] = _check_section(raw["sweep"], _SWEEP_KEYS, "sweep")

    _validate_semantics(cfg, base)
    return cfg


def _validate_semantics(cfg: dict, base: str) -> None:
    params = cfg["params"]
    integ = cfg["integrator"]
    init = cfg["initial"]

    extended = cfg["run"]["system"].startswith("extended:")
    if integ["scheme"] is None:
        integ["scheme"] = "if_rk4" if base in CIRCLE_SYSTEMS and not extended else "rk4"
    if integ["scheme"] not in SCHEMES:
        raise ConfigError(
            f"unknown scheme {integ['scheme']!r}", kind="schema", key="scheme"
        )
    if integ["scheme"] == "if_rk4" and (base not in CIRCLE_SYSTEMS or extended):
        raise ConfigError(
            "scheme if_rk4 requires a diagonal linear part; system"
            f" {cfg['run']['system']!r} has none", kind="schema", key="scheme",
        )
    if integ["dt"] <= 0:
        raise ConfigError("dt must be positive", kind="schema", key="dt")
    if integ["t_end"] < 0:
        raise ConfigError("t_end must be nonnegative", kind="schema", key="t_end")
    if integ["monitor_stride"] < 1:
        raise ConfigError(
            "monitor_stride must be >= 1", kind="schema", key="monitor_stride"
        )

    if base in CIRCLE_SYSTEMS:
        if params["alpha"] < 0 or params["beta"] < 0 or (
            params["alpha"] == 0 and params["beta"] == 0
        ):
            raise ConfigError(
                "(alpha, beta) must be nonnegative and not both zero",
                kind="schema", key="alpha",
            )
        if base in ("burgers", "ch") and params["a"] != 0:
            raise ConfigError(
                f"{base} is unmagnetized; set a = 0 or use its magnetic"
                " counterpart", kind="schema", key="a",
            )
        if params["K"] < 1:
            raise ConfigError("K must be positive", kind="schema", key="K")
    elif base == "qg":
        if params["gamma"] < 0:
            raise ConfigError("gamma must be nonnegative", kind="schema", key="gamma")
        if params["Ro"] <= 0:
            raise ConfigError("Ro must be positive", kind="schema", key="Ro")
        if params["lmax"] < 2:
            raise ConfigError("lmax must be at least 2", kind="schema", key="lmax")
        if params["topography"] not in ("zero", "zonal:P2", "gaussian-bump"):
            raise ConfigError(
                f"unknown topography {params['topography']!r}",
                kind="schema", key="topography",
            )
    elif base == "ic":
        if params["K"] < 1:
            raise ConfigError("K must be positive", kind="schema", key="K")
        B = params["B"]
        if len(B) != 3 or not all(
            isinstance(x, _NUM) and not isinstance(x, bool) for x in B
        ):
            raise ConfigError(
                "B must be a 3-vector of numbers", kind="schema", key="B"
            )

    if init["file"] is not None:
        if init["preset"] is not None:
            raise ConfigError(
                "give either an initial preset or a file, not both",
                kind="schema", key="file",
            )
        if not Path(init["file"]).exists():
            raise ConfigError(
                f"initial-condition file not found: {init['file']}",
                kind="missing-file", key="file",
            )
    else:
        if init["preset"] is None:
            init["preset"] = _DEFAULT_INITIAL_PRESET[base]
        if init["preset"] not in _INITIAL_PRESETS[base]:
            raise ConfigError(
                f"unknown initial preset {init['preset']!r} for system {base!r}",
                kind="schema", key="preset",
            )
        if base == "qg" and params["gamma"] == 0:
            if init["preset"] == "harmonic" and init["l"] == 0:
                raise ConfigError(
                    "gamma = 0 requires a mean-free initial stream function"
                    " (harmonic degree l = 0 has nonzero mean)",
                    kind="schema", key="l",
                )

    if "sweep" in cfg:
        param = cfg["sweep"]["parameter"]
        section, _, key = param.partition(".")
        if section != "params" or key not in _PARAM_KEYS[base]:
            raise ConfigError(
                f"sweep parameter {param!r} is not a [params] key of {base!r}",
                kind="schema", key="parameter",
            )
        if not cfg["sweep"]["values"]:
            raise ConfigError(
                "sweep values must be nonempty", kind="schema", key="values"
            )


def parse_config(path) -> dict:
    """Parse and validate a TOML run config; returns the normalized dict."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}", kind="missing-file")
    try:
        with open(p, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error in {path}: {exc}", kind="syntax") from None
    return _validate(raw)


def parse_config_dict(raw: dict) -> dict:
    """Validate an in-memory config table (same rules as :func:`parse_config`)."""
    return _validate(copy.deepcopy(raw))


# ---------------------------------------------------------------------------
# Normalized TOML echo
# ---------------------------------------------------------------------------

def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {v!r} to TOML")


def dump_toml(cfg: dict) -> str:
    """Serialize a (validated) config dict back to TOML text."""
    lines = []
    for section in ("run", "params", "integrator", "initial", "output", "sweep"):
        if section not in cfg:
            continue
        lines.append(f"[{section}]")
        for key, value in cfg[section].items():
            if value is None:
                continue
            lines.append(f"{key} = {_toml_scalar(value)}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# System and initial-state assembly
# ---------------------------------------------------------------------------

@dataclass
class RunSetup:
    system: FlowSystem
    u0: np.ndarray
    integrator: IntegratorConfig
    system_name: str
    truncation: int
    seed: int
    output: dict


def _circle_initial(init: dict, K: int, period: float, rng) -> np.ndarray:
    if init["preset"] == "cosine":
        c = np.zeros(K + 1, dtype=complex)
        mode = init["mode"]
        if not 1 <= mode <= K:
            raise ConfigError(
                f"cosine mode {mode} outside 1..{K}", kind="schema", key="mode"
            )
        c[mode] = 0.5 * init["amplitude"]
        return c
    if init["preset"] == "constant":
        c = np.zeros(K + 1, dtype=complex)
        c[0] = init["amplitude"]
        return c
    return circle.random_field(
        K, init["bandwidth"], rng, amplitude=init["amplitude"], period=period
    ).coeffs


def _qg_initial(init: dict, params: dict, rng) -> np.ndarray:
    lmax = params["lmax"]
    if init["preset"] == "harmonic":
        l, m = init["l"], init["m"]
        if not (0 <= m <= l <= lmax):
            raise ConfigError(
                f"harmonic (l={l}, m={m}) outside the truncation",
                kind="schema", key="l",
            )
        amp = init["amplitude"] * (1.0 if m == 0 else (1.0 + 0.5j))
        return sphere.SphereField.harmonic(lmax, l, m, amp).coeffs
    f = sphere.random_field(
        lmax, init["bandwidth"], rng, amplitude=init["amplitude"]
    )
    if init["preset"] == "zonal":
        c = np.zeros_like(f.coeffs)
        c[:, 0] = f.coeffs[:, 0].real
        return c
    return f.coeffs


def _ic_initial(init: dict, K: int, rng) -> np.ndarray:
    if init["preset"] == "shear":
        amp = init["amplitude"]
        zero = lambda x, y, z: np.zeros_like(x)
        return torus.from_function(
            lambda x, y, z: amp * np.sin(z), zero, zero, K
        ).coeffs
    return torus.random_divfree_field(
        K, init["bandwidth"], rng, amplitude=init["amplitude"]
    ).coeffs


def build_run(cfg: dict) -> RunSetup:
    """Instantiate the system, initial state, and integrator from a config."""
    system_name = cfg["run"]["system"]
    base = _base_system(system_name)
    params = cfg["params"]
    init = cfg["initial"]
    rng = np.random.default_rng(cfg["run"]["seed"])

    if base in CIRCLE_SYSTEMS:
        ccfg = circle.CircleSystemConfig(
            alpha=params["alpha"], beta=params["beta"], a=params["a"],
            K=params["K"], L=params["period"], dealias=params["dealias"],
        )
        sys = circle.circle_system(ccfg, name=base)
        truncation = params["K"]
        state_shape = (params["K"] + 1,)
        if init["file"] is not None:
            _, u0 = read_snapshot(init["file"])
        else:
            u0 = _circle_initial(init, params["K"], params["period"], rng)
    elif base == "qg":
        h = None
        if params["topography"] != "zero":
            h = sphere.topography_preset(
                params["topography"], params["lmax"],
                amplitude=params["topography_amplitude"],
            )
        qcfg = sphere.QGConfig(
            gamma=params["gamma"], Ro=params["Ro"], h=h, a=params["a"],
            lmax=params["lmax"], radius_factor=params["radius_factor"],
            phi_topography_over_Ro=params["phi_topography_over_Ro"],
        )
        sys = sphere.qg_system(qcfg, name="qg")
        truncation = params["lmax"]
        state_shape = (params["lmax"] + 1, params["lmax"] + 1)
        if init["file"] is not None:
            _, u0 = read_snapshot(init["file"])
        else:
            u0 = _qg_initial(init, params, rng)
    else:  # ic
        tcfg = torus.ICConfig(
            B=tuple(params["B"]), a=params["a"], K=params["K"],
            dealias=params["dealias"],
        )
        sys = torus.ic_system(tcfg, name="ic")
        truncation = params["K"]
        N = 2 * (params["K"] + 1)
        state_shape = (3, N, N, N // 2 + 1)
        if init["file"] is not None:
            _, u0 = read_snapshot(init["file"])
        else:
            u0 = _ic_initial(init, params["K"], rng)

    u0 = np.asarray(u0, dtype=complex)
    if u0.shape != state_shape:
        raise ConfigError(
            f"initial state shape {u0.shape} does not match the"
            f" {base!r} truncation (expected {state_shape})",
            kind="schema", key="file",
        )

    if system_name.startswith("extended:"):
        charge = sys.strength
        sys = extend_central(sys.with_strength(0.0), state_shape)
        u0 = extended_state(u0, charge)

    integ = cfg["integrator"]
    icfg = IntegratorConfig(
        dt=float(integ["dt"]), t_end=float(integ["t_end"]),
        scheme=integ["scheme"], monitor_stride=int(integ["monitor_stride"]),
    )
    return RunSetup(
        system=sys, u0=u0, integrator=icfg, system_name=system_name,
        truncation=truncation, seed=cfg["run"]["seed"], output=cfg["output"],
    )
