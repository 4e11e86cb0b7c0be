"""A small line-oriented language for feed-forward optical circuits.

Grammar, one statement per line (``#`` starts a comment)::

    mode <ident>
    squeeze <mode> r=<float> rp=<float> axis=<amp|phase>
    bs <m1> <m2> rt=<int>:<int> phase=<float>
    phase <mode> <float>
    loss <mode> eta=<float>
    beam <ident> h=<mode> alpha_c=<float> alpha_a=<float> theta=<float>

``rt=R:T`` is the reflectivity:transmissivity ratio, normalized so that
``R + T = 1``. Beam-splitter outputs keep the input mode names.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import gaussian as g
from .errors import InvalidArgument, PreconditionViolation
from .gaussian import Axis, GaussianState, SqueezerSpec, SymplecticTransform
from .polarization import BrightBeam

DEFAULT_INTENSITY_RATIO = 1 / 30


class CircuitError(InvalidArgument):
    """A circuit program is malformed; carries the 1-based source location."""

    def __init__(self, reason: str, line: int | None = None, column: int | None = None):
        self.reason = reason
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(reason + where)


@dataclass(frozen=True)
class ModeDecl:
    name: str


@dataclass(frozen=True)
class Squeeze:
    mode: str
    r: float
    r_prime: float = 0.0
    axis: Axis = Axis.AMPLITUDE

    def spec(self) -> SqueezerSpec:
        return SqueezerSpec(self.r, self.r_prime, self.axis)


@dataclass(frozen=True)
class BeamSplit:
    m1: str
    m2: str
    ratio: tuple[int, int]
    phase: float = 0.0

    @property
    def reflectivity(self) -> float:
        r, t = self.ratio
        return r / (r + t)


@dataclass(frozen=True)
class PhaseShift:
    mode: str
    radians: float


@dataclass(frozen=True)
class Loss:
    mode: str
    eta: float


@dataclass(frozen=True)
class BeamDecl:
    name: str
    h_mode: str
    alpha_c: float
    alpha_a: float = 0.0
    theta: float = 0.0


CircuitElement = Union[ModeDecl, Squeeze, BeamSplit, PhaseShift, Loss, BeamDecl]


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered list of circuit elements."""

    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def mode_names(self) -> list[str]:
        return [e.name for e in self.elements if isinstance(e, ModeDecl)]

    @property
    def n_modes(self) -> int:
        return len(self.mode_names)

    @property
    def beams(self) -> list[BeamDecl]:
        return [e for e in self.elements if isinstance(e, BeamDecl)]

    def mode_index(self, name: str) -> int:
        return self.mode_names.index(name)


# --- parsing -----------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        body = text.split("#", 1)[0]
        self.tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]

    def error(self, reason, token_index=None):
        col = self.tokens[token_index][1] if token_index is not None and token_index < len(self.tokens) else None
        return CircuitError(reason, self.lineno, col)


def _float(line, idx, text, what):
    try:
        value = float(text)
    except ValueError:
        raise line.error(f"malformed number {text!r} for {what}", idx) from None
    if not math.isfinite(value):
        raise line.error(f"non-finite value {text!r} for {what}", idx)
    return value


def _ident(line, idx, what):
    if idx >= len(line.tokens):
        raise line.error(f"missing {what}")
    tok = line.tokens[idx][0]
    if not _IDENT.match(tok):
        raise line.error(f"invalid {what} {tok!r}", idx)
    return tok


def _keywords(line, start, required, optional=()):
    out = {}
    for idx in range(start, len(line.tokens)):
        tok = line.tokens[idx][0]
        key, sep, value = tok.partition("=")
        if not sep or not value:
            raise line.error(f"expected key=value, got {tok!r}", idx)
        if key not in required and key not in optional:
            raise line.error(f"unknown argument {key!r}", idx)
        if key in out:
            raise line.error(f"duplicate argument {key!r}", idx)
        out[key] = (value, idx)
    for key in required:
        if key not in out:
            raise line.error(f"missing argument {key}=")
    return out


def _positional_count(line, n, stmt):
    # statement keyword plus n positional operands, all before any key=value
    if len(line.tokens) < n + 1 or any("=" in t for t, _ in line.tokens[1:n + 1]):
        raise line.error(f"'{stmt}' expects {n} operand(s)")


def _parse_statement(line: _Line) -> CircuitElement:
    stmt = line.tokens[0][0]
    if stmt == "mode":
        if len(line.tokens) != 2:
            raise line.error("'mode' expects exactly one name")
        return ModeDecl(_ident(line, 1, "mode name"))
    if stmt == "squeeze":
        _positional_count(line, 1, stmt)
        kw = _keywords(line, 2, ("r", "rp", "axis"))
        r = _float(line, kw["r"][1], kw["r"][0], "r")
        rp = _float(line, kw["rp"][1], kw["rp"][0], "rp")
        if r < 0:
            raise line.error(f"negative squeezing parameter r={r}", kw["r"][1])
        if rp < 0:
            raise line.error(f"negative excess noise rp={rp}", kw["rp"][1])
        axis = {"amp": Axis.AMPLITUDE, "phase": Axis.PHASE}.get(kw["axis"][0])
        if axis is None:
            raise line.error(f"axis must be 'amp' or 'phase', got {kw['axis'][0]!r}", kw["axis"][1])
        return Squeeze(_ident(line, 1, "mode name"), r, rp, axis)
    if stmt == "bs":
        _positional_count(line, 2, stmt)
        kw = _keywords(line, 3, ("rt",), ("phase",))
        text, idx = kw["rt"]
        m = re.fullmatch(r"(\d+):(\d+)", text)
        if not m:
            raise line.error(f"rt must be <int>:<int>, got {text!r}", idx)
        ratio = (int(m.group(1)), int(m.group(2)))
        if sum(ratio) == 0:
            raise line.error("rt=0:0 cannot be normalized so that R+T=1", idx)
        phase = _float(line, kw["phase"][1], kw["phase"][0], "phase") if "phase" in kw else 0.0
        m1, m2 = _ident(line, 1, "mode name"), _ident(line, 2, "mode name")
        if m1 == m2:
            raise line.error("beam splitter needs two distinct modes", 2)
        return BeamSplit(m1, m2, ratio, phase)
    if stmt == "phase":
        if len(line.tokens) != 3:
            raise line.error("'phase' expects a mode and an angle")
        return PhaseShift(_ident(line, 1, "mode name"), _float(line, 2, line.tokens[2][0], "phase"))
    if stmt == "loss":
        _positional_count(line, 1, stmt)
        kw = _keywords(line, 2, ("eta",))
        eta = _float(line, kw["eta"][1], kw["eta"][0], "eta")
        if not 0.0 <= eta <= 1.0:
            raise line.error(f"eta must lie in [0, 1], got {eta}", kw["eta"][1])
        return Loss(_ident(line, 1, "mode name"), eta)
    if stmt == "beam":
        _positional_count(line, 1, stmt)
        kw = _keywords(line, 2, ("h", "alpha_c"), ("alpha_a", "theta"))
        h_text, h_idx = kw["h"]
        if not _IDENT.match(h_text):
            raise line.error(f"invalid mode name {h_text!r}", h_idx)
        alpha_c = _float(line, kw["alpha_c"][1], kw["alpha_c"][0], "alpha_c")
        alpha_a = _float(line, kw["alpha_a"][1], kw["alpha_a"][0], "alpha_a") if "alpha_a" in kw else 0.0
        theta = _float(line, kw["theta"][1], kw["theta"][0], "theta") if "theta" in kw else 0.0
        if alpha_c <= 0:
            raise line.error(f"alpha_c must be > 0, got {alpha_c}", kw["alpha_c"][1])
        if alpha_a < 0:
            raise line.error(f"alpha_a must be >= 0, got {alpha_a}", kw["alpha_a"][1])
        return BeamDecl(_ident(line, 1, "beam name"), h_text, alpha_c, alpha_a, theta)
    raise line.error(f"unknown statement {stmt!r}", 0)


def _referenced_modes(el) -> list[str]:
    if isinstance(el, BeamSplit):
        return [el.m1, el.m2]
    if isinstance(el, BeamDecl):
        return [el.h_mode]
    if isinstance(el, ModeDecl):
        return []
    return [el.mode]


def validate_circuit(spec: CircuitSpec, linenos=None) -> None:
    """Check declaration order and squeezer placement.

    Raises:
        CircuitError: on the first violation, with the line number when known.
    """
    linenos = linenos or [None] * len(spec.elements)
    declared, beams, squeezed, mixed = set(), set(), set(), set()
    for el, lineno in zip(spec.elements, linenos):
        if isinstance(el, ModeDecl):
            if el.name in declared:
                raise CircuitError(f"duplicate mode '{el.name}'", lineno)
            declared.add(el.name)
            continue
        for name in _referenced_modes(el):
            if name not in declared:
                raise CircuitError(f"unknown mode '{name}'", lineno)
        if isinstance(el, Squeeze):
            if el.mode in squeezed:
                raise CircuitError(f"mode '{el.mode}' is squeezed twice", lineno)
            if el.mode in mixed:
                raise CircuitError(f"mode '{el.mode}' is squeezed after a beam splitter touched it", lineno)
            squeezed.add(el.mode)
        elif isinstance(el, BeamSplit):
            mixed.update((el.m1, el.m2))
        elif isinstance(el, BeamDecl):
            if el.name in beams:
                raise CircuitError(f"duplicate beam name '{el.name}'", lineno)
            beams.add(el.name)


def parse_circuit(text: str) -> CircuitSpec:
    """Parse circuit source text.

    Raises:
        CircuitError: with the offending line (and column when it can be
            pinned to a token) and the reason.
    """
    elements, linenos = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _Line(raw, lineno)
        if not line.tokens:
            continue
        elements.append(_parse_statement(line))
        linenos.append(lineno)
    spec = CircuitSpec(tuple(elements))
    validate_circuit(spec, linenos)
    return spec


def format_circuit(spec: CircuitSpec) -> str:
    """Pretty-print a spec; ``parse_circuit(format_circuit(s)) == s``."""
    lines = []
    for el in spec.elements:
        if isinstance(el, ModeDecl):
            lines.append(f"mode {el.name}")
        elif isinstance(el, Squeeze):
            axis = "amp" if el.axis is Axis.AMPLITUDE else "phase"
            lines.append(f"squeeze {el.mode} r={el.r!r} rp={el.r_prime!r} axis={axis}")
        elif isinstance(el, BeamSplit):
            lines.append(f"bs {el.m1} {el.m2} rt={el.ratio[0]}:{el.ratio[1]} phase={el.phase!r}")
        elif isinstance(el, PhaseShift):
            lines.append(f"phase {el.mode} {el.radians!r}")
        elif isinstance(el, Loss):
            lines.append(f"loss {el.mode} eta={el.eta!r}")
        elif isinstance(el, BeamDecl):
            lines.append(
                f"beam {el.name} h={el.h_mode} alpha_c={el.alpha_c!r} alpha_a={el.alpha_a!r} theta={el.theta!r}"
            )
    return "\n".join(lines) + "\n"


# --- compilation -------------------------------------------------------------


def circuit_transform(spec: CircuitSpec) -> SymplecticTransform:
    """Compose the passive elements (beam splitters, phase shifts) in order.

    Losses are not symplectic and are skipped; squeezers are sources.
    """
    n = spec.n_modes
    if n == 0:
        raise CircuitError("circuit declares no modes")
    S = SymplecticTransform.identity(n)
    for el in spec.elements:
        if isinstance(el, BeamSplit):
            S = g.beamsplitter_transform(n, spec.mode_index(el.m1), spec.mode_index(el.m2), el.reflectivity, el.phase) @ S
        elif isinstance(el, PhaseShift):
            S = g.phase_shift_transform(n, spec.mode_index(el.mode), el.radians) @ S
    return S


def compile_circuit(spec: CircuitSpec) -> tuple[GaussianState, list[BrightBeam]]:
    """Run the circuit on vacuum and attach the declared bright beams.

    Each declared beam gets its own coherent V mode, appended after the circuit
    modes in declaration order as a vacuum-noise mode.

    Returns:
        The final state over ``n_modes + len(beams)`` modes and the beams.
    """
    validate_circuit(spec)
    n = spec.n_modes
    if n == 0:
        raise CircuitError("circuit declares no modes")
    state = g.vacuum_state(n)
    for el in spec.elements:
        if isinstance(el, Squeeze):
            try:
                state = g.set_dopa_output(state, spec.mode_index(el.mode), el.spec())
            except PreconditionViolation as exc:
                raise CircuitError(str(exc)) from exc
        elif isinstance(el, BeamSplit):
            S = g.beamsplitter_transform(n, spec.mode_index(el.m1), spec.mode_index(el.m2), el.reflectivity, el.phase)
            state = g.apply_transform(state, S)
        elif isinstance(el, PhaseShift):
            state = g.apply_transform(state, g.phase_shift_transform(n, spec.mode_index(el.mode), el.radians))
        elif isinstance(el, Loss):
            state = g.loss_channel(state, spec.mode_index(el.mode), el.eta)
    decls = spec.beams
    state = g.extend_with_vacuum(state, len(decls))
    beams = [
        BrightBeam(d.name, spec.mode_index(d.h_mode), n + i, d.alpha_c, d.alpha_a, d.theta)
        for i, d in enumerate(decls)
    ]
    return state, beams


def ghz_preset(
    specs=None,
    alpha_c: float = 1.0,
    alpha_a: float | None = None,
    theta: float = 0.0,
) -> CircuitSpec:
    """Three squeezers on a 1:2 and a 1:1 beam splitter, read out as d1, d2, d3.

    Mode ``a1`` is phase squeezed, ``a2`` and ``a3`` amplitude squeezed. The
    first splitter mixes ``a1``/``a2``; its ``a1`` output is mixed with ``a3``
    on the second. With the package's beam-splitter convention the outputs
    ``a2``, ``a1``, ``a3`` carry the amplitudes

        d1 = a1/sqrt3 - sqrt(2/3) a2
        d2 = a1/sqrt3 - a2/sqrt6 + a3/sqrt2
        d3 = a1/sqrt3 - a2/sqrt6 - a3/sqrt2

    which is the standard GHZ-like pattern with the sign of the ``a2`` input
    flipped; that sign is invisible for zero-mean squeezed inputs.

    Args:
        specs: Three :class:`SqueezerSpec` (default: unsqueezed).
        alpha_c: Coherent V amplitude shared by the three beams.
        alpha_a: Mean H amplitude; defaults to ``alpha_c / sqrt(30)``.
        theta: Relative H/V phase for every beam.
    """
    if specs is None:
        specs = (SqueezerSpec(0.0, 0.0, Axis.PHASE), SqueezerSpec(0.0), SqueezerSpec(0.0))
    specs = tuple(specs)
    if len(specs) != 3:
        raise InvalidArgument("the GHZ preset needs exactly three squeezer specs")
    expected = (Axis.PHASE, Axis.AMPLITUDE, Axis.AMPLITUDE)
    if tuple(s.axis for s in specs) != expected:
        warnings.warn("GHZ preset expects axes (phase, amplitude, amplitude)", stacklevel=2)
    if alpha_a is None:
        alpha_a = alpha_c * math.sqrt(DEFAULT_INTENSITY_RATIO)
    els = [ModeDecl("a1"), ModeDecl("a2"), ModeDecl("a3")]
    els += [Squeeze(name, s.r, s.r_prime, s.axis) for name, s in zip(("a1", "a2", "a3"), specs)]
    els += [
        BeamSplit("a1", "a2", (1, 2), 0.0),
        BeamSplit("a1", "a3", (1, 1), 0.0),
        BeamDecl("d1", "a2", alpha_c, alpha_a, theta),
        BeamDecl("d2", "a1", alpha_c, alpha_a, theta),
        BeamDecl("d3", "a3", alpha_c, alpha_a, theta),
    ]
    return CircuitSpec(tuple(els))


def ghz_specs(r1, r1p, r2, r2p, r3, r3p) -> tuple[SqueezerSpec, SqueezerSpec, SqueezerSpec]:
    """Squeezer specs for the preset from per-mode ``(r, r')``."""
    return (
        SqueezerSpec(r1, r1p, Axis.PHASE),
        SqueezerSpec(r2, r2p, Axis.AMPLITUDE),
        SqueezerSpec(r3, r3p, Axis.AMPLITUDE),
    )


def mixing_coefficients(spec: CircuitSpec) -> np.ndarray:
    """Amplitude mixing matrix ``U`` of the passive part, ``out = U @ in``.

    Read off the X+ rows of the compiled transform; only meaningful when all
    phases are zero (then the transform is ``U (x) I_2``).
    """
    M = circuit_transform(spec).matrix
    return M[0::2, 0::2].copy()


GHZ_PRESET_TEXT = """\
# Tripartite GHZ-like network: one phase-squeezed and two amplitude-squeezed inputs
mode a1
mode a2
mode a3
squeeze a1 r={r1} rp={r1p} axis=phase
squeeze a2 r={r2} rp={r2p} axis=amp
squeeze a3 r={r3} rp={r3p} axis=amp
bs a1 a2 rt=1:2 phase=0
bs a1 a3 rt=1:1 phase=0
beam d1 h=a2 alpha_c={alpha_c} alpha_a={alpha_a} theta={theta}
beam d2 h=a1 alpha_c={alpha_c} alpha_a={alpha_a} theta={theta}
beam d3 h=a3 alpha_c={alpha_c} alpha_a={alpha_a} theta={theta}
"""
