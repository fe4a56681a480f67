"""Construction certificates: a replayable step machine, a generator and a verifier.

A certificate is a base construction followed by transformations.  Replaying
the steps from scratch must land exactly on the claimed (ambient, class,
surface) triple; nothing in the claim is trusted.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from .congruence import (
    audin_check,
    characteristic_obstruction,
    realizable_nonorientable,
    sphere_advisory,
    sphere_class_check,
    zt_class,
    zt_min_blowups,
)
from .lattice import (
    IntegralClass,
    LatticeError,
    Mod2Class,
    RationalManifold,
    mod2_reduce,
    orbit_signature,
    permute_exceptional,
)
from .surfaces import SurfaceType

FORMAT_VERSION = 1
MAX_BLOWUPS = 1024

BASE_OPS = (
    "RealRP2",
    "CliffordTorus",
    "RealKleinBottle",
    "LagrangianSphere",
    "AntidiagonalSphere",
    "GiventalSurface",
)
TRANSFORM_OPS = (
    "BlowUp",
    "PadBlowUp",
    "AddFourCrosscaps",
    "Relabel",
    "FiberSumToS2xS2",
    "SwapFactors",
)

_PARAM_KEYS = {
    "LagrangianSphere": {"t"},
    "GiventalSurface": {"l", "manifold"},
    "AddFourCrosscaps": {"l"},
    "Relabel": {"perm"},
}


class StepRejected(Exception):
    def __init__(self, rule: str, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.rule = rule
        self.index = index

    def __str__(self):
        where = "" if self.index is None else f"step {self.index}: "
        return f"{where}{self.rule}: {self.args[0]}"


class GenerationError(ValueError):
    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class Step:
    op: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"op": self.op, "params": {k: self.params[k] for k in sorted(self.params)}}

    @classmethod
    def from_json(cls, data: Any) -> "Step":
        if not isinstance(data, dict) or set(data) != {"op", "params"}:
            raise StepRejected("malformed", "a step is an object with exactly 'op' and 'params'")
        if not isinstance(data["params"], dict):
            raise StepRejected("malformed", "step params must be an object")
        return cls(data["op"], dict(data["params"]))

    def short(self) -> str:
        if self.op == "LagrangianSphere":
            return f"Sphere(Z{self.params['t']})"
        if self.op == "GiventalSurface":
            return f"Givental({self.params['l']})"
        if self.op == "AddFourCrosscaps":
            return f"AddFour({self.params['l']})"
        return self.op


@dataclass(frozen=True)
class LagrangianState:
    ambient: RationalManifold
    cls: Mod2Class
    surface: SurfaceType
    chi: int

    def __post_init__(self):
        if self.cls.manifold != self.ambient:
            raise ValueError(f"class lives in {self.cls.manifold}, ambient is {self.ambient}")
        if self.chi != self.surface.euler:
            raise ValueError(f"chi {self.chi} disagrees with surface Euler number {self.surface.euler}")

    @classmethod
    def of(cls, ambient: RationalManifold, bits: Sequence[int], surface: SurfaceType) -> "LagrangianState":
        return cls(ambient, Mod2Class(ambient, tuple(bits)), surface, surface.euler)

    @property
    def crosscaps(self) -> int:
        return 0 if self.surface.orientable else self.surface.crosscaps


@dataclass(frozen=True)
class Claim:
    cls: Mod2Class
    chi: int
    crosscaps: int

    def matches(self, state: LagrangianState) -> bool:
        if state.cls != self.cls or state.chi != self.chi:
            return False
        if self.crosscaps == 0:
            return state.surface.orientable
        return not state.surface.orientable and state.surface.crosscaps == self.crosscaps


@dataclass(frozen=True)
class ConstructionCertificate:
    manifold: RationalManifold
    steps: tuple[Step, ...]
    claim: Claim

    def summary(self) -> str:
        return ";".join(s.short() for s in self.steps)

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "manifold": self.manifold.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "claim": {
                "class": str(self.claim.cls),
                "chi": self.claim.chi,
                "crosscaps": self.claim.crosscaps,
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, doc: Any) -> "ConstructionCertificate":
        if not isinstance(doc, dict) or set(doc) != {"version", "manifold", "steps", "claim"}:
            raise StepRejected("malformed", "certificate needs exactly version, manifold, steps, claim")
        if doc["version"] != FORMAT_VERSION:
            raise StepRejected("malformed", f"unsupported version {doc['version']!r}")
        try:
            X = RationalManifold.from_json(doc["manifold"])
            claim = doc["claim"]
            if not isinstance(claim, dict) or set(claim) != {"class", "chi", "crosscaps"}:
                raise StepRejected("malformed", "claim needs exactly class, chi, crosscaps")
            if not (_is_int(claim["chi"]) and _is_int(claim["crosscaps"]) and isinstance(claim["class"], str)):
                raise StepRejected("malformed", "claim fields have the wrong types")
            A = Mod2Class.parse(X, claim["class"])
        except LatticeError as e:
            raise StepRejected("malformed", str(e)) from None
        if not isinstance(doc["steps"], list):
            raise StepRejected("malformed", "steps must be a list")
        steps = []
        for i, s in enumerate(doc["steps"]):
            try:
                steps.append(Step.from_json(s))
            except StepRejected as e:
                e.index = i
                raise
        return cls(X, tuple(steps), Claim(A, claim["chi"], claim["crosscaps"]))

    @classmethod
    def loads(cls, text: str) -> "ConstructionCertificate":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise StepRejected("malformed", f"not valid JSON: {e}", _broken_step(text)) from None
        return cls.from_json(doc)


_STEPS_KEY = re.compile(r'"steps"\s*:\s*\[')


def _broken_step(text: str) -> Optional[int]:
    """Index of the first step that does not decode, for truncated or damaged files."""
    m = _STEPS_KEY.search(text)
    if m is None:
        return None
    dec = json.JSONDecoder()
    pos, i = m.end(), 0
    while True:
        while pos < len(text) and text[pos] in " \t\r\n,":
            pos += 1
        if pos < len(text) and text[pos] == "]":
            return None
        try:
            _, pos = dec.raw_decode(text, pos)
        except json.JSONDecodeError:
            return i
        i += 1


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _int_param(step: Step, name: str, minimum: int) -> int:
    v = step.params[name]
    if not _is_int(v) or v < minimum:
        raise StepRejected("bad_params", f"{step.op} needs integer {name} >= {minimum}, got {v!r}")
    return v


@functools.lru_cache(maxsize=None)
def _sphere_state(t: int) -> LagrangianState:
    k = zt_min_blowups(t)
    full = zt_class(t, 2 * t + 2)
    if any(full.coeffs[k + 1:]):
        raise AssertionError("Z_t support exceeds its minimal ambient")
    X = RationalManifold.cp2_blowup(k)
    Z = IntegralClass(X, full.coeffs[: k + 1])
    if not sphere_class_check(X, Z):
        raise StepRejected("sphere_check", f"Z_{t} fails Z.K = 0, Z.Z = -2")
    return LagrangianState(X, mod2_reduce(Z), SurfaceType.sphere(), 2)


def _require_blowup(state: LagrangianState, op: str) -> RationalManifold:
    X = state.ambient
    if X.is_product:
        raise StepRejected("precondition", f"{op} is only modelled on blow-ups of CP2")
    if X.k + 1 > MAX_BLOWUPS:
        raise StepRejected("blowup_overflow", f"{op} would exceed {MAX_BLOWUPS} blow-ups")
    return RationalManifold.cp2_blowup(X.k + 1)


def apply_step(state: Optional[LagrangianState], step: Step) -> LagrangianState:
    """Successor of ``state`` under ``step``; raises StepRejected on any violated rule."""
    op = step.op
    if op not in BASE_OPS and op not in TRANSFORM_OPS:
        raise StepRejected("unknown_op", f"unknown step {op!r}")
    if set(step.params) != _PARAM_KEYS.get(op, set()):
        raise StepRejected("bad_params", f"{op} takes params {sorted(_PARAM_KEYS.get(op, set()))}")

    if op in BASE_OPS:
        if state is not None:
            raise StepRejected("base_not_first", f"base step {op} after the construction started")
        if op == "RealRP2":
            return LagrangianState.of(RationalManifold.cp2_blowup(0), (1,), SurfaceType.nonorientable(1))
        if op == "CliffordTorus":
            return LagrangianState.of(RationalManifold.cp2_blowup(0), (0,), SurfaceType.torus())
        if op == "RealKleinBottle":
            return LagrangianState.of(RationalManifold.cp2_blowup(1), (1, 1), SurfaceType.nonorientable(2))
        if op == "LagrangianSphere":
            return _sphere_state(_int_param(step, "t", 0))
        if op == "AntidiagonalSphere":
            return LagrangianState.of(RationalManifold.s2xs2(), (1, 1), SurfaceType.sphere())
        l = _int_param(step, "l", 1)
        try:
            X = RationalManifold.from_json(step.params["manifold"])
        except LatticeError as e:
            raise StepRejected("bad_params", str(e)) from None
        return LagrangianState(X, Mod2Class.zero(X), SurfaceType.nonorientable(4 * l + 2), -4 * l)

    if state is None:
        raise StepRejected("no_base", f"{op} needs a base construction first")
    X, A, S = state.ambient, state.cls, state.surface

    if op == "BlowUp":
        Y = _require_blowup(state, op)
        return LagrangianState.of(Y, A.bits + (1,), S.add_crosscaps(1))
    if op == "PadBlowUp":
        Y = _require_blowup(state, op)
        return LagrangianState.of(Y, A.bits + (0,), S)
    if op == "AddFourCrosscaps":
        l = _int_param(step, "l", 1)
        return LagrangianState.of(X, A.bits, S.add_crosscaps(4 * l))
    if op == "Relabel":
        perm = step.params["perm"]
        if X.is_product:
            raise StepRejected("precondition", "Relabel needs exceptional classes")
        if not isinstance(perm, list) or not all(_is_int(p) for p in perm):
            raise StepRejected("bad_params", "Relabel perm must be a list of integers")
        try:
            B = permute_exceptional(A, perm)
        except LatticeError as e:
            raise StepRejected("bad_params", str(e)) from None
        return LagrangianState(X, B, S, state.chi)
    if op == "FiberSumToS2xS2":
        if X != RationalManifold.cp2_blowup(1) or A.bits != (1, 1) or S != SurfaceType.nonorientable(2):
            raise StepRejected(
                "precondition",
                f"fiber sum needs the Klein bottle H+E1 in cp2+1, got {S.short()} in class {A} of {X}",
            )
        Y = RationalManifold.s2xs2()
        return LagrangianState.of(Y, (0, 1), S)
    # SwapFactors
    if not X.is_product:
        raise StepRejected("precondition", "SwapFactors needs S2xS2")
    return LagrangianState.of(X, (A.bits[1], A.bits[0]), S)


def replay(steps: Sequence[Step]) -> LagrangianState:
    if not steps:
        raise StepRejected("empty", "certificate has no steps", 0)
    state = None
    for i, step in enumerate(steps):
        try:
            state = apply_step(state, step)
        except StepRejected as e:
            e.index = i
            raise
    return state


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    rule: Optional[str] = None
    step_index: Optional[int] = None
    message: str = ""

    def __str__(self):
        if self.accepted:
            return "accept"
        where = "" if self.step_index is None else f" at step {self.step_index}"
        return f"reject{where} ({self.rule}): {self.message}"


def verify(cert: ConstructionCertificate) -> Verdict:
    try:
        state = replay(cert.steps)
    except StepRejected as e:
        return Verdict(False, e.rule, e.index, e.args[0])
    end = len(cert.steps)
    if state.ambient != cert.manifold:
        return Verdict(False, "state_mismatch", end, f"replay ends in {state.ambient}, certificate says {cert.manifold}")
    if not state.surface.embedded or state.surface.components != 1:
        return Verdict(False, "state_mismatch", end, "replayed surface is not a connected embedded surface")
    if not cert.claim.matches(state):
        return Verdict(
            False,
            "state_mismatch",
            end,
            f"replay gives {state.surface.short()} (chi={state.chi}) in class {state.cls}, "
            f"claim is crosscaps={cert.claim.crosscaps} chi={cert.claim.chi} in class {cert.claim.cls}",
        )
    if not state.cls.is_zero and not audin_check(state.cls, state.chi):
        return Verdict(False, "audin", end, f"P({state.cls}) is not congruent to {state.chi} mod 4")
    return Verdict(True)


def verify_text(text: str) -> Verdict:
    try:
        cert = ConstructionCertificate.loads(text)
    except StepRejected as e:
        return Verdict(False, e.rule, e.index, e.args[0])
    return verify(cert)


# -- generator ---------------------------------------------------------------

def _blowups(n: int) -> list[Step]:
    return [Step("BlowUp") for _ in range(n)]


def _cp2_chain(a: int, m: int, k: int) -> list[Step]:
    """Minimal-genus construction for the class H^a + E1 + ... + Em, fitting in CP2 # k."""
    if a == 0:
        if m == 1:
            return [Step("CliffordTorus")] + _blowups(1)
        l, j = divmod(m - 2, 4)
        return [Step("LagrangianSphere", {"t": 2 * l})] + _blowups(j)
    if m < 3:
        return [Step("RealRP2")] + _blowups(m)
    l, j = divmod(m - 3, 4)
    t = 2 * l + 1
    if zt_min_blowups(t) + j <= k:
        return [Step("LagrangianSphere", {"t": t})] + _blowups(j)
    # only the fully supported class H+E1+...+Ek with k = 4l+3+j, l >= 1, lands here
    return [Step("LagrangianSphere", {"t": 1})] + _blowups(m - 3)


def _align(state: LagrangianState, target: Mod2Class) -> list[Step]:
    """PadBlowUp and Relabel steps carrying ``state`` onto ``target``'s ambient and class."""
    X = target.manifold
    steps = [Step("PadBlowUp") for _ in range(X.k - state.ambient.k)]
    bits = state.cls.bits[1:] + (0,) * len(steps)
    have_ones = [i + 1 for i, b in enumerate(bits) if b]
    have_zeros = [i + 1 for i, b in enumerate(bits) if not b]
    want_ones = [i for i in range(1, X.k + 1) if target.bits[i]]
    want_zeros = [i for i in range(1, X.k + 1) if not target.bits[i]]
    perm = [0] * X.k
    for src, dst in zip(have_ones + have_zeros, want_ones + want_zeros):
        perm[src - 1] = dst
    if perm != list(range(1, X.k + 1)):
        steps.append(Step("Relabel", {"perm": perm}))
    return steps


def _finish(X: RationalManifold, A: Mod2Class, chi: int, steps: list[Step],
            state: Optional[LagrangianState] = None) -> ConstructionCertificate:
    if state is None:
        state = replay(steps)
    if chi > state.chi or (state.chi - chi) % 4:
        detail = " as a sphere" if chi == 2 else ""
        if characteristic_obstruction(A, chi):
            detail = f"; A is characteristic and no N_{2 - chi} satisfies the Guillou-Marin congruence"
        raise GenerationError(
            "unattained",
            f"best construction for {A} in {X} reaches chi={state.chi}, cannot reach chi={chi}{detail}",
        )
    if chi < state.chi:
        steps = steps + [Step("AddFourCrosscaps", {"l": (state.chi - chi) // 4})]
        state = apply_step(state, steps[-1])
    return ConstructionCertificate(X, tuple(steps), Claim(A, chi, state.crosscaps))


def generate(X: RationalManifold, A: Mod2Class, chi: int) -> ConstructionCertificate:
    """Certificate realizing ``A`` by a Lagrangian of Euler number ``chi``.

    ``chi = 2`` asks for a Lagrangian sphere; any other value must be accepted
    by the realizability oracle.  Raises GenerationError otherwise.
    """
    if A.manifold != X:
        raise LatticeError(f"class belongs to {A.manifold}, not {X}")
    if chi == 2:
        if not sphere_advisory(A):
            raise GenerationError("no_sphere", f"{A} in {X} is not a sphere class of the Z_t family or B+F")
    else:
        answer = realizable_nonorientable(X, A, chi)
        if not answer.realizable:
            raise GenerationError(answer.reason, f"{A} in {X} with chi={chi} is not realizable ({answer.reason})")

    if A.is_zero:
        return _finish(X, A, chi, [Step("GiventalSurface", {"l": -chi // 4, "manifold": X.to_json()})])

    if X.is_product:
        if A.bits == (1, 1):
            steps = [Step("AntidiagonalSphere")]
        else:
            steps = [Step("RealKleinBottle"), Step("FiberSumToS2xS2")]
            if A.bits == (1, 0):
                steps.append(Step("SwapFactors"))
        return _finish(X, A, chi, steps)

    a, m = orbit_signature(A)
    steps = _cp2_chain(a, m, X.k)
    if chi == 2 and len(steps) > 1:
        raise GenerationError("no_sphere", f"no sphere construction for {A} in {X}")
    state = replay(steps)
    for step in _align(state, A):
        state = apply_step(state, step)
        steps.append(step)
    return _finish(X, A, chi, steps, state)


__all__ = [
    "BASE_OPS",
    "Claim",
    "ConstructionCertificate",
    "GenerationError",
    "LagrangianState",
    "Step",
    "StepRejected",
    "TRANSFORM_OPS",
    "Verdict",
    "apply_step",
    "generate",
    "replay",
    "verify",
    "verify_text",
]
