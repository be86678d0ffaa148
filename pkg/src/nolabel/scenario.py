"""Declarative scenario execution and reporting.

A scenario JSON file describes statistics, a mode basis, an initial state,
optional local noise, a deformation, detection regions, and requested
outputs; :func:`run_pipeline` executes

    initial state -> (noise) -> deformation -> indistinguishability
                  -> coincidence postselection -> entanglement measures

deterministically, and :func:`run_sweep` repeats it over a parameter grid.
Reports are written as CSV or JSON with a stable column order and numbers
serialized to 12 significant digits.  See ``docs/scenarios.md`` for the
schema and ``scenarios/`` for annotated examples.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .deformations import (
    DeformationSpec,
    deform,
    deform_ensemble,
    internal_unitary,
    spatial_unitary,
    two_mode_overlap,
    SingleParticleUnitary,
)
from .errors import NoLabelError, PipelineError, ScenarioError
from .indistinguishability import DetectionSetup, degree_of_indistinguishability, detection_matrix
from .quantum_info import (
    CHANNEL_NAMES,
    channel,
    apply_local_channel,
    concurrence,
    entanglement_of_formation,
    fidelity,
)
from .slocc import (
    LabeledState,
    SloccRegions,
    slocc_postselect_mixed,
    slocc_postselect_pure,
)
from .states import (
    EQ_TOL,
    ZERO_TOL,
    Ensemble,
    ModeBasis,
    NState,
    Region,
    Statistics,
    build_preset,
    default_protocol_basis,
    PRESET_NAMES,
)

SWEEP_PARAMETERS = ("l", "r", "l_prime", "r_prime", "q")
FIDELITY_TARGETS = ("max_entangled", "bell_singlet", "bell_triplet", "none")
NOISE_PLACEMENTS = ("before_deformation", "none")


# ---------------------------------------------------------------------------
# Configuration model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialSpec:
    preset: str
    modes: tuple[str, str] = ("A", "B")
    spins: tuple[str, str] = ("up", "down")
    dof: str = "spin"
    terms: Union[tuple, None] = None
    members: Union[tuple, None] = None


@dataclass(frozen=True)
class NoiseSpec:
    channel: str
    strength: float
    placement: str = "before_deformation"


@dataclass(frozen=True)
class FourAmplitudes:
    """The two-constituent overlap parametrization: the first constituent
    goes to l|first target> + r|second target|, the second to the primed
    pair; each pair is normalized."""

    l: complex
    r: complex
    l_prime: complex
    r_prime: complex


@dataclass(frozen=True)
class ExplicitPairs:
    spec: DeformationSpec


@dataclass(frozen=True)
class OutputSpec:
    fidelity_target: str = "max_entangled"


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int


@dataclass(frozen=True)
class ScenarioConfig:
    statistics: Statistics
    basis: ModeBasis
    initial: InitialSpec
    noise: Union[NoiseSpec, None]
    deformation: Union[FourAmplitudes, ExplicitPairs]
    slocc: SloccRegions
    outputs: OutputSpec
    sweep: Union[SweepSpec, None]
    source: str = "<memory>"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _require_mapping(value, where: str) -> Mapping:
    if not isinstance(value, Mapping):
        raise ScenarioError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(mapping: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown field(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _parse_amplitude(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ScenarioError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _parse_basis(data, where: str) -> ModeBasis:
    data = _require_mapping(data, where)
    _reject_unknown(data, {"spatial_modes", "internal"}, where)
    modes = data.get("spatial_modes")
    if not isinstance(modes, list) or not all(isinstance(m, str) for m in modes):
        raise ScenarioError(f"{where}.spatial_modes: expected a list of mode names")
    internal = []
    raw_internal = data.get("internal", [])
    if isinstance(raw_internal, Mapping):
        raw_internal = [[name, levels] for name, levels in raw_internal.items()]
    for i, entry in enumerate(raw_internal):
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or not isinstance(entry[1], list)
        ):
            raise ScenarioError(f"{where}.internal[{i}]: expected [dof_name, [levels...]]")
        internal.append((entry[0], tuple(str(v) for v in entry[1])))
    try:
        return ModeBasis(tuple(modes), tuple(internal))
    except NoLabelError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _parse_initial(data, where: str) -> InitialSpec:
    data = _require_mapping(data, where)
    _reject_unknown(data, {"preset", "modes", "spins", "dof", "terms", "members"}, where)
    preset = data.get("preset")
    if preset not in PRESET_NAMES:
        raise ScenarioError(f"{where}.preset: must be one of {', '.join(PRESET_NAMES)}; got {preset!r}")
    modes = tuple(data.get("modes", ("A", "B")))
    spins = tuple(data.get("spins", ("up", "down")))
    if len(modes) != 2 or len(spins) != 2:
        raise ScenarioError(f"{where}: 'modes' and 'spins' must each list two entries")

    def freeze(value):
        if isinstance(value, Mapping):
            return tuple(sorted((k, freeze(v)) for k, v in value.items()))
        if isinstance(value, (list, tuple)):
            return tuple(freeze(v) for v in value)
        return value

    terms = freeze(data["terms"]) if "terms" in data else None
    members = freeze(data["members"]) if "members" in data else None
    if preset == "custom" and terms is None and members is None:
        raise ScenarioError(f"{where}: the custom preset needs 'terms' or 'members'")
    return InitialSpec(preset, modes, spins, data.get("dof", "spin"), terms, members)


def _parse_noise(data, where: str) -> NoiseSpec:
    data = _require_mapping(data, where)
    _reject_unknown(data, {"channel", "strength", "placement"}, where)
    name = data.get("channel")
    if name not in CHANNEL_NAMES:
        raise ScenarioError(f"{where}.channel: must be one of {', '.join(CHANNEL_NAMES)}; got {name!r}")
    strength = data.get("strength")
    if not isinstance(strength, (int, float)) or isinstance(strength, bool) or not 0.0 <= strength <= 1.0:
        raise ScenarioError(f"{where}.strength: expected a number in [0, 1], got {strength!r}")
    placement = data.get("placement", "before_deformation")
    if placement not in NOISE_PLACEMENTS:
        raise ScenarioError(f"{where}.placement: must be one of {', '.join(NOISE_PLACEMENTS)}; got {placement!r}")
    return NoiseSpec(name, float(strength), placement)


def _parse_unitary(data, basis: ModeBasis, where: str) -> SingleParticleUnitary:
    data = _require_mapping(data, where)
    kinds = [k for k in ("spatial_map", "matrix", "internal") if k in data]
    if len(kinds) != 1:
        raise ScenarioError(f"{where}: give exactly one of 'spatial_map', 'matrix', 'internal'")
    try:
        if kinds[0] == "spatial_map":
            mapping = _require_mapping(data["spatial_map"], f"{where}.spatial_map")
            columns = {
                src: {
                    dst: _parse_amplitude(amp, f"{where}.spatial_map[{src!r}][{dst!r}]")
                    for dst, amp in _require_mapping(targets, f"{where}.spatial_map[{src!r}]").items()
                }
                for src, targets in mapping.items()
            }
            return spatial_unitary(basis, columns, label=data.get("label", ""))
        if kinds[0] == "matrix":
            rows = data["matrix"]
            matrix = np.array(
                [[_parse_amplitude(v, f"{where}.matrix[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(rows)]
            )
            return SingleParticleUnitary(matrix, label=data.get("label", ""))
        inner = _require_mapping(data["internal"], f"{where}.internal")
        rows = inner.get("matrix")
        matrix = np.array(
            [[_parse_amplitude(v, f"{where}.internal.matrix[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(rows)]
        )
        return internal_unitary(basis, inner.get("dof", "spin"), matrix, label=data.get("label", ""))
    except ScenarioError:
        raise
    except NoLabelError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _parse_deformation(data, basis: ModeBasis, where: str):
    data = _require_mapping(data, where)
    if "pairs" in data:
        _reject_unknown(data, {"pairs"}, where)
        pairs = []
        for i, entry in enumerate(data["pairs"]):
            entry = _require_mapping(entry, f"{where}.pairs[{i}]")
            region_modes = entry.get("region")
            if not isinstance(region_modes, list) or not region_modes:
                raise ScenarioError(f"{where}.pairs[{i}].region: expected a nonempty list of modes")
            region = Region.of(*region_modes)
            try:
                region.validate(basis)
            except NoLabelError as exc:
                raise ScenarioError(f"{where}.pairs[{i}].region: {exc}") from exc
            unitary = _parse_unitary(
                {k: v for k, v in entry.items() if k != "region"}, basis, f"{where}.pairs[{i}]"
            )
            pairs.append((unitary, region))
        return ExplicitPairs(DeformationSpec(tuple(pairs)))

    _reject_unknown(data, {"l", "r", "l_prime", "r_prime"}, where)
    values = {}
    for key in ("l", "r", "l_prime", "r_prime"):
        if key not in data:
            raise ScenarioError(f"{where}.{key}: required by the four-amplitude parametrization")
        values[key] = _parse_amplitude(data[key], f"{where}.{key}")
    for first, second in (("l", "r"), ("l_prime", "r_prime")):
        total = abs(values[first]) ** 2 + abs(values[second]) ** 2
        if abs(total - 1.0) > EQ_TOL:
            raise ScenarioError(
                f"{where}: |{first}|^2 + |{second}|^2 must equal 1 "
                f"(normalization constraint), got {total:.12g}"
            )
    return FourAmplitudes(values["l"], values["r"], values["l_prime"], values["r_prime"])


def _parse_regions(data, basis: ModeBasis, where: str) -> SloccRegions:
    if not isinstance(data, list) or not data:
        raise ScenarioError(f"{where}: expected a nonempty list of mode lists")
    regions = []
    for i, group in enumerate(data):
        if not isinstance(group, list) or not group:
            raise ScenarioError(f"{where}[{i}]: expected a nonempty list of modes")
        region = Region.of(*group)
        try:
            region.validate(basis)
        except NoLabelError as exc:
            raise ScenarioError(f"{where}[{i}]: {exc}") from exc
        regions.append(region)
    try:
        return SloccRegions(tuple(regions))
    except NoLabelError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _parse_outputs(data, where: str) -> OutputSpec:
    data = _require_mapping(data, where)
    _reject_unknown(data, {"fidelity_target"}, where)
    target = data.get("fidelity_target", "max_entangled")
    if target not in FIDELITY_TARGETS:
        raise ScenarioError(f"{where}.fidelity_target: must be one of {', '.join(FIDELITY_TARGETS)}; got {target!r}")
    return OutputSpec(target)


def _parse_sweep(data, config_deformation, noise, where: str) -> SweepSpec:
    data = _require_mapping(data, where)
    _reject_unknown(data, {"parameter", "start", "stop", "steps"}, where)
    parameter = data.get("parameter")
    if parameter not in SWEEP_PARAMETERS:
        raise ScenarioError(f"{where}.parameter: must be one of {', '.join(SWEEP_PARAMETERS)}; got {parameter!r}")
    if parameter == "q" and noise is None:
        raise ScenarioError(f"{where}: sweeping 'q' needs a noise section")
    if parameter != "q" and not isinstance(config_deformation, FourAmplitudes):
        raise ScenarioError(f"{where}: sweeping {parameter!r} needs the four-amplitude deformation")
    try:
        start, stop = float(data["start"]), float(data["stop"])
        steps = int(data["steps"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: needs numeric 'start', 'stop' and integer 'steps'") from exc
    if steps < 1:
        raise ScenarioError(f"{where}.steps: must be >= 1")
    for name, value in (("start", start), ("stop", stop)):
        if not 0.0 <= value <= 1.0:
            raise ScenarioError(f"{where}.{name}: swept values must lie in [0, 1], got {value}")
    return SweepSpec(parameter, start, stop, steps)


def parse_scenario(data: Mapping, source: str = "<memory>") -> ScenarioConfig:
    """Validate a raw mapping into a :class:`ScenarioConfig`."""
    data = _require_mapping(data, "config")
    allowed = {
        "description",
        "statistics",
        "basis",
        "initial_state",
        "noise",
        "deformation",
        "slocc_regions",
        "outputs",
        "sweep",
    }
    _reject_unknown(data, allowed, "config")
    if "statistics" not in data:
        raise ScenarioError("config.statistics: required ('bosons' or 'fermions')")
    try:
        statistics = Statistics.coerce(data["statistics"])
    except NoLabelError as exc:
        raise ScenarioError(f"config.statistics: {exc}") from exc

    basis = (
        _parse_basis(data["basis"], "config.basis") if "basis" in data else default_protocol_basis()
    )
    if "initial_state" not in data:
        raise ScenarioError("config.initial_state: required")
    initial = _parse_initial(data["initial_state"], "config.initial_state")
    for mode in initial.modes:
        if mode not in basis.spatial_modes:
            raise ScenarioError(f"config.initial_state.modes: {mode!r} is not a basis mode")

    noise = _parse_noise(data["noise"], "config.noise") if data.get("noise") is not None else None
    if "deformation" not in data:
        raise ScenarioError("config.deformation: required")
    deformation = _parse_deformation(data["deformation"], basis, "config.deformation")
    slocc = _parse_regions(data.get("slocc_regions", [["L"], ["R"]]), basis, "config.slocc_regions")
    if isinstance(deformation, FourAmplitudes):
        if slocc.n != 2 or any(len(r.modes) != 1 for r in slocc.regions):
            raise ScenarioError(
                "config.slocc_regions: the four-amplitude deformation needs two single-mode regions"
            )
    outputs = _parse_outputs(data.get("outputs", {}), "config.outputs")
    sweep = (
        _parse_sweep(data["sweep"], deformation, noise, "config.sweep")
        if data.get("sweep") is not None
        else None
    )
    return ScenarioConfig(statistics, basis, initial, noise, deformation, slocc, outputs, sweep, source)


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    return parse_scenario(data, source=str(path))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


RUN_RECORD_COLUMNS = (
    "statistics",
    "preset",
    "l",
    "r",
    "l_prime",
    "r_prime",
    "noise_channel",
    "noise_strength",
    "noise_placement",
    "sweep_parameter",
    "sweep_value",
    "indistinguishability",
    "probability",
    "concurrence",
    "entanglement_of_formation",
    "fidelity_target",
    "fidelity",
    "wall_time_s",
)


@dataclass
class RunRecord:
    """One pipeline execution: inputs alongside the measured outputs."""

    statistics: str
    preset: str
    l: Union[complex, None]
    r: Union[complex, None]
    l_prime: Union[complex, None]
    r_prime: Union[complex, None]
    noise_channel: Union[str, None]
    noise_strength: Union[float, None]
    noise_placement: Union[str, None]
    sweep_parameter: Union[str, None]
    sweep_value: Union[float, None]
    indistinguishability: float
    probability: float
    concurrence: Union[float, None]
    entanglement_of_formation: Union[float, None]
    fidelity_target: Union[str, None]
    fidelity: Union[float, None]
    wall_time_s: float

    def __post_init__(self):
        for name in (
            "indistinguishability",
            "probability",
            "concurrence",
            "entanglement_of_formation",
            "fidelity",
            "wall_time_s",
        ):
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(value):
                raise PipelineError("record", f"{name} is not finite: {value!r}")
            if name in ("probability", "fidelity", "concurrence", "entanglement_of_formation"):
                if not -EQ_TOL <= value <= 1.0 + EQ_TOL:
                    raise PipelineError("record", f"{name} outside [0, 1]: {value!r}")
                setattr(self, name, min(1.0, max(0.0, value)))

    def to_row(self) -> dict:
        row = {}
        for name in RUN_RECORD_COLUMNS:
            value = getattr(self, name)
            if isinstance(value, complex):
                value = value.real if abs(value.imag) <= ZERO_TOL else [value.real, value.imag]
            row[name] = value
        return row


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except NoLabelError as exc:
        raise PipelineError(name, str(exc)) from exc


def _build_initial(config: ScenarioConfig):
    init = config.initial
    kwargs = {}
    if init.terms is not None:
        kwargs["terms"] = init.terms
    if init.members is not None:
        kwargs["members"] = init.members
    return build_preset(
        init.preset,
        config.statistics,
        basis=config.basis,
        modes=init.modes,
        spins=init.spins,
        dof=init.dof,
        **kwargs,
    )


def _deformation_spec(config: ScenarioConfig) -> DeformationSpec:
    d = config.deformation
    if isinstance(d, ExplicitPairs):
        return d.spec
    targets = tuple(next(iter(r.modes)) for r in config.slocc.regions)
    return two_mode_overlap(
        config.basis, d.l, d.r, d.l_prime, d.r_prime, sources=config.initial.modes, targets=targets
    )


def _common_detection_factors(deformed, setup: DetectionSetup):
    """Factor list shared by every term (and member); the measure needs a
    single detection profile across the superposition."""
    candidates = []
    if isinstance(deformed, NState):
        candidates = [t.factors for t in deformed.terms]
    else:
        for weight, member in deformed.members:
            if weight > ZERO_TOL:
                candidates.extend(t.factors for t in member.terms)
    if not candidates:
        raise PipelineError("indistinguishability", "deformed state has no surviving component")
    reference = detection_matrix(setup, candidates[0])
    for other in candidates[1:]:
        if np.max(np.abs(detection_matrix(setup, other) - reference)) > EQ_TOL:
            raise PipelineError(
                "indistinguishability",
                "superposition terms have differing detection profiles; the measure is undefined",
            )
    return candidates[0]


def _target_state(config: ScenarioConfig) -> Union[LabeledState, None]:
    name = config.outputs.fidelity_target
    if name == "none":
        return None
    basis, regions = config.basis, config.slocc
    if regions.n != 2 or basis.n_internal < 2:
        raise PipelineError(
            "measures", f"fidelity target {name!r} needs two regions and a two-level internal dof"
        )
    amps = np.zeros(basis.n_internal**2, dtype=complex)
    root = 1.0 / np.sqrt(2.0)
    sign = {"max_entangled": float(config.statistics.eta), "bell_singlet": -1.0, "bell_triplet": 1.0}[name]
    amps[1] = root                      # (first config, second config)
    amps[basis.n_internal] = sign * root  # (second config, first config)
    return LabeledState(basis, regions, amps)


def run_pipeline(config: ScenarioConfig, sweep_point: tuple = (None, None)) -> RunRecord:
    """Execute a scenario once; deterministic for a given config."""
    started = time.perf_counter()

    with _stage("initial-state"):
        state = _build_initial(config)

    if config.noise is not None and config.noise.placement == "before_deformation":
        with _stage("noise"):
            ch = channel(config.noise.channel, config.noise.strength)
            regions = SloccRegions.of((config.initial.modes[0],), (config.initial.modes[1],))
            state = apply_local_channel(ch, 0, state, regions)
            state = apply_local_channel(ch, 1, state, regions)

    with _stage("deformation"):
        spec = _deformation_spec(config)
        if isinstance(state, Ensemble):
            deformed = deform_ensemble(spec, state)
        else:
            deformed = deform(spec, state)

    with _stage("indistinguishability"):
        setup = DetectionSetup.spatial(*config.slocc.regions)
        factors = _common_detection_factors(deformed, setup)
        indist = degree_of_indistinguishability(setup, factors)

    with _stage("postselection"):
        if isinstance(deformed, Ensemble):
            dm, probability = slocc_postselect_mixed(deformed, config.slocc)
        else:
            labeled, probability = slocc_postselect_pure(deformed, config.slocc)
            dm = labeled.density_matrix()

    with _stage("measures"):
        if dm.matrix.shape[0] == 4:
            conc = concurrence(dm)
            eof = entanglement_of_formation(dm)
        else:
            conc = eof = None
        target = _target_state(config)
        fid = fidelity(dm.matrix, target) if target is not None else None

    d = config.deformation
    amplitudes = (
        (d.l, d.r, d.l_prime, d.r_prime) if isinstance(d, FourAmplitudes) else (None, None, None, None)
    )
    return RunRecord(
        statistics=config.statistics.name.lower(),
        preset=config.initial.preset,
        l=amplitudes[0],
        r=amplitudes[1],
        l_prime=amplitudes[2],
        r_prime=amplitudes[3],
        noise_channel=config.noise.channel if config.noise else None,
        noise_strength=config.noise.strength if config.noise else None,
        noise_placement=config.noise.placement if config.noise else None,
        sweep_parameter=sweep_point[0],
        sweep_value=sweep_point[1],
        indistinguishability=float(indist),
        probability=float(probability),
        concurrence=conc,
        entanglement_of_formation=eof,
        fidelity_target=config.outputs.fidelity_target if target is not None else None,
        fidelity=fid,
        wall_time_s=time.perf_counter() - started,
    )


_AMPLITUDE_PARTNERS = {"l": "r", "r": "l", "l_prime": "r_prime", "r_prime": "l_prime"}


def _with_sweep_value(config: ScenarioConfig, parameter: str, value: float) -> ScenarioConfig:
    if parameter == "q":
        return dataclasses.replace(
            config, noise=dataclasses.replace(config.noise, strength=value), sweep=None
        )
    partner = _AMPLITUDE_PARTNERS[parameter]
    updates = {
        parameter: complex(value),
        partner: complex(np.sqrt(max(0.0, 1.0 - value * value))),
    }
    return dataclasses.replace(
        config, deformation=dataclasses.replace(config.deformation, **updates), sweep=None
    )


def run_sweep(config: ScenarioConfig, threads: int = 1) -> list[RunRecord]:
    """Run the pipeline over the configured parameter grid, in grid order."""
    if config.sweep is None:
        raise ScenarioError("config has no sweep section; use run_pipeline")
    sweep = config.sweep
    values = np.linspace(sweep.start, sweep.stop, sweep.steps)

    def one(indexed) -> RunRecord:
        index, value = indexed
        try:
            derived = _with_sweep_value(config, sweep.parameter, float(value))
            return run_pipeline(derived, sweep_point=(sweep.parameter, float(value)))
        except PipelineError as exc:
            raise PipelineError(
                "sweep", f"row {index} ({sweep.parameter}={value:.6g}): {exc}"
            ) from exc

    points = list(enumerate(values))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _significant(value: float) -> float:
    return float(f"{value:.12g}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):  # complex stored as [re, im]
        return f"{value[0]:.12g}{value[1]:+.12g}j"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return _significant(value)
    if isinstance(value, (list, tuple)):
        return [_significant(v) for v in value]
    return value


def render_rows(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], fmt: str) -> str:
    """Render mappings as CSV (header + rows) or a JSON array of objects."""
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(c)) for c in columns])
        return buffer.getvalue()
    if fmt == "json":
        payload = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    raise ScenarioError(f"format must be 'csv' or 'json', got {fmt!r}")


def render_report(records: Sequence[RunRecord], fmt: str = "csv") -> str:
    return render_rows([r.to_row() for r in records], RUN_RECORD_COLUMNS, fmt)


def emit_report(records: Sequence[RunRecord], fmt: str, path) -> Path:
    """Write the records to ``path`` in the requested format."""
    path = Path(path)
    text = render_report(records, fmt)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ScenarioError(f"cannot write report to {path}: {exc}") from exc
    return path
