"""Concrete time-stepped networks: encoder, ancilla prep, syndrome rounds.

All layout choices live in the module-level tables below; the Monte Carlo
engine executes the same tables, so censuses, dumps and the simulation can
never drift apart.  Qubits are 0-indexed (data bit j <-> data position j+1).

Layout notes:
  * cat-state fan-out runs the leg to the other verified qubit (a4) first;
    with verification CNOTs on (a1, a4) this is what makes every accepted
    single-fault bit-flip pattern equivalent to weight <= 1 on the data.
  * prep is scheduled serially, one gate per step (7 steps, plus one step of
    four H gates for the bit-syndrome kind).
  * each syndrome round exposes the data block for exactly 6 steps, one
    ancilla group firing all four of its data CNOTs per step; phase groups
    fire at steps 1-3, bit groups at steps 4-6.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import codebook
from .pauli import PauliFrame, apply_cnot, apply_h

N_DATA = 7

# Support of each parity-check row over the data block, ascending.
ROW_SUPPORTS: tuple[tuple[int, ...], ...] = tuple(
    tuple(j for j in range(N_DATA) if (row >> j) & 1) for row in codebook.H_ROWS
)

# (kind, row) per data step of one syndrome round, in firing order.
GROUP_ORDER: tuple[tuple[str, int], ...] = (
    ("bit", 0),
    ("bit", 1),
    ("bit", 2),
    ("phase", 0),
    ("phase", 1),
    ("phase", 2),
)

# Ancilla prep on 5 local qubits (0..3 cat, 4 verification), one gate per step.
PREP_STEPS: tuple[tuple[tuple, ...], ...] = (
    (("H", 0),),
    (("CNOT", 0, 3),),
    (("CNOT", 0, 1),),
    (("CNOT", 0, 2),),
    (("CNOT", 3, 4),),
    (("CNOT", 0, 4),),
    (("M", 4),),
)
PREP_BIT_H_LAYER: tuple[tuple, ...] = (("H", 0), ("H", 1), ("H", 2), ("H", 3))

# Encoder on the 7 data qubits; input state sits at index 2 (third qubit).
# H qubits are the generator pivots; CNOT targets never re-enter as controls
# except qubit 2, whose fan-out fires first.
ENCODER_INPUT = 2
ENCODER_STEPS: tuple[tuple[tuple, ...], ...] = (
    (("H", 0), ("H", 1), ("H", 3), ("CNOT", 2, 4)),
    (("CNOT", 2, 5), ("CNOT", 0, 4), ("CNOT", 3, 6)),
    (("CNOT", 0, 2), ("CNOT", 1, 5), ("CNOT", 3, 4)),
    (("CNOT", 0, 6), ("CNOT", 1, 2), ("CNOT", 3, 5)),
    (("CNOT", 1, 6),),
)


@dataclass(frozen=True)
class Location:
    """One error location: a gate, measurement, idle slot, or correction."""

    step: int
    kind: str  # "H", "CNOT", "M", "I" (idle), "P" (Pauli correction)
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind == "CNOT":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"bad CNOT qubits {self.qubits}")
        elif self.kind in ("H", "I", "P"):
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} takes exactly one qubit")
        elif self.kind == "M":
            if not self.qubits:
                raise ValueError("measurement set must be nonempty")
        else:
            raise ValueError(f"unknown location kind {self.kind!r}")


@dataclass(frozen=True)
class Network:
    n_qubits: int
    locations: tuple[Location, ...]
    data_qubits: tuple[int, ...] = ()
    ancilla_blocks: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        busy: dict[int, set[int]] = {}
        for loc in self.locations:
            seen = busy.setdefault(loc.step, set())
            for q in loc.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"qubit {q} out of range at step {loc.step}")
                if q in seen:
                    raise ValueError(f"qubit {q} used twice in step {loc.step}")
                seen.add(q)

    def steps(self) -> list[list[Location]]:
        """Locations grouped by step, ascending."""
        out: dict[int, list[Location]] = {}
        for loc in self.locations:
            out.setdefault(loc.step, []).append(loc)
        return [sorted(out[s], key=lambda l: (l.kind, l.qubits)) for s in sorted(out)]

    def dump_text(self) -> str:
        lines = [
            f"{loc.step}\t{loc.kind}\t{','.join(map(str, loc.qubits))}"
            for loc in sorted(self.locations, key=lambda l: (l.step, l.kind, l.qubits))
        ]
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.dump_text().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Census:
    cnot_count: int
    h_count: int
    measure_count: int
    step_count: int
    data_cnot_count: int = 0
    data_step_count: int = 0


def census(net: Network) -> Census:
    cnot = sum(1 for l in net.locations if l.kind == "CNOT")
    h = sum(1 for l in net.locations if l.kind == "H")
    m = sum(1 for l in net.locations if l.kind == "M")
    steps = {l.step for l in net.locations}
    data = set(net.data_qubits)
    data_cnot = sum(
        1 for l in net.locations if l.kind == "CNOT" and data.intersection(l.qubits)
    )
    data_steps = {
        l.step for l in net.locations if data.intersection(l.qubits)
    }
    return Census(
        cnot_count=cnot,
        h_count=h,
        measure_count=m,
        step_count=(max(steps) - min(steps) + 1) if steps else 0,
        data_cnot_count=data_cnot,
        data_step_count=len(data_steps),
    )


@dataclass(frozen=True)
class RecoverySchedule:
    """Step accounting for one full recovery (three rounds plus correction)."""

    rounds: int = 3
    steps_per_round: int = 6
    correction_steps: int = 1
    channel_prefix_steps: int = 1
    inter_recovery_gap: int = 1

    def __post_init__(self) -> None:
        if self.rounds != 3:
            raise ValueError("majority-vote recovery is defined for exactly 3 rounds")
        if self.steps_per_round != 6:
            raise ValueError("the interaction layout spans exactly 6 data steps")
        if self.correction_steps != 1:
            raise ValueError("correction takes exactly one step")
        if self.channel_prefix_steps < 0 or self.inter_recovery_gap < 0:
            raise ValueError("step counts must be non-negative")

    @property
    def data_exposure_steps(self) -> int:
        """Data steps inside the recovery proper (3x6 rounds + correction)."""
        return self.rounds * self.steps_per_round + self.correction_steps

    @property
    def total_steps(self) -> int:
        """Including the channel prefix; 20 for the default schedule."""
        return self.channel_prefix_steps + self.data_exposure_steps


def _prep_locations(kind: str, qmap, step0: int) -> list[Location]:
    locs = []
    steps = PREP_STEPS + (PREP_BIT_H_LAYER,) if kind == "bit" else PREP_STEPS
    for ds, gates in enumerate(steps):
        for g in gates:
            if g[0] == "CNOT":
                locs.append(Location(step0 + ds, "CNOT", (qmap[g[1]], qmap[g[2]])))
            else:
                locs.append(Location(step0 + ds, g[0], (qmap[g[1]],)))
    return locs


def prep_step_count(kind: str) -> int:
    return len(PREP_STEPS) + (1 if kind == "bit" else 0)


def build_ancilla_prep(kind: str) -> Network:
    """Verified cat/Shor ancilla synthesis on 5 qubits (qubit 4 verifies)."""
    if kind not in ("phase_syndrome", "bit_syndrome", "phase", "bit"):
        raise ValueError(f"unknown ancilla kind {kind!r}")
    short = "bit" if kind.startswith("bit") else "phase"
    locs = _prep_locations(short, list(range(5)), 1)
    return Network(5, tuple(locs), data_qubits=(), ancilla_blocks=((0, 1, 2, 3, 4),))


def build_encoder() -> Network:
    """Fig.-2-style encoding network on the 7 data qubits (input at index 2)."""
    locs = []
    for ds, gates in enumerate(ENCODER_STEPS):
        for g in gates:
            if g[0] == "CNOT":
                locs.append(Location(1 + ds, "CNOT", (g[1], g[2])))
            else:
                locs.append(Location(1 + ds, "H", (g[1],)))
    return Network(N_DATA, tuple(locs), data_qubits=tuple(range(N_DATA)))


def _round_locations(anc_base: int, data_step0: int) -> tuple[list[Location], list[tuple[int, ...]]]:
    """One syndrome round; interactions at data steps data_step0..data_step0+5.

    All six ancilla preps run in parallel, finishing at round start; a group
    firing at slot k idles its verified cat for k steps (explicit Idle
    locations, since idle qubits still take memory errors).
    """
    locs: list[Location] = []
    blocks: list[tuple[int, ...]] = []
    for slot, (kind, row) in enumerate(GROUP_ORDER):
        base = anc_base + 5 * slot
        qmap = list(range(base, base + 5))
        blocks.append(tuple(qmap))
        fire = data_step0 + slot
        locs += _prep_locations(kind, qmap, data_step0 - prep_step_count(kind))
        for wait_step in range(data_step0, fire):
            for q in qmap[:4]:
                locs.append(Location(wait_step, "I", (q,)))
        for i, d in enumerate(ROW_SUPPORTS[row]):
            if kind == "phase":
                locs.append(Location(fire, "CNOT", (qmap[i], d)))
            else:
                locs.append(Location(fire, "CNOT", (d, qmap[i])))
        cat = tuple(qmap[:4])
        if kind == "phase":
            for q in cat:
                locs.append(Location(fire + 1, "H", (q,)))
            locs.append(Location(fire + 2, "M", cat))
        else:
            locs.append(Location(fire + 1, "M", cat))
    return locs, blocks


def _normalize(locs: list[Location]) -> tuple[Location, ...]:
    shift = 1 - min(l.step for l in locs)
    return tuple(
        Location(l.step + shift, l.kind, l.qubits)
        for l in sorted(locs, key=lambda l: (l.step, l.kind, l.qubits))
    )


def build_syndrome_round() -> Network:
    """A single six-bit syndrome measurement round (24 data-facing CNOTs)."""
    locs, blocks = _round_locations(anc_base=N_DATA, data_step0=100)
    return Network(
        N_DATA + 30,
        _normalize(locs),
        data_qubits=tuple(range(N_DATA)),
        ancilla_blocks=tuple(blocks),
    )


def build_recovery(schedule: RecoverySchedule = RecoverySchedule()) -> Network:
    """Three syndrome rounds plus the correction step, with channel prefix."""
    locs: list[Location] = []
    blocks: list[tuple[int, ...]] = []
    base_step = 100  # provisional; normalized at the end
    for t in range(schedule.channel_prefix_steps):
        for q in range(N_DATA):
            locs.append(Location(base_step + t, "I", (q,)))
    data_step0 = base_step + schedule.channel_prefix_steps
    anc_base = N_DATA
    for _ in range(schedule.rounds):
        rl, rb = _round_locations(anc_base, data_step0)
        locs += rl
        blocks += rb
        anc_base += 30
        data_step0 += schedule.steps_per_round
    for q in range(N_DATA):
        locs.append(Location(data_step0, "P", (q,)))
    return Network(
        anc_base,
        _normalize(locs),
        data_qubits=tuple(range(N_DATA)),
        ancilla_blocks=tuple(blocks),
    )


def _f2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
            rank += 1
    return rank


def verify_encoder(net: Network) -> bool:
    """Heisenberg check of an encoding network on 7 qubits.

    The six initial Z operators on the |0> qubits must map into the code's
    stabilizer group, independently, and the input qubit's X and Z must map
    to representatives of logical X and logical Z (up to stabilizer).
    """
    if net.n_qubits != N_DATA:
        return False

    def propagate(x0: int, z0: int) -> tuple[int, int]:
        frame = PauliFrame(x0, z0, N_DATA)
        for step in net.steps():
            for loc in step:
                if loc.kind == "H":
                    frame = apply_h(frame, loc.qubits[0])
                elif loc.kind == "CNOT":
                    frame = apply_cnot(frame, loc.qubits[0], loc.qubits[1])
        return frame.x_mask, frame.z_mask

    cperp = codebook.tables().cperp_words
    c = codebook.tables().c_words
    stab_images = []
    for q in range(N_DATA):
        if q == ENCODER_INPUT:
            continue
        x, z = propagate(0, 1 << q)
        if x not in cperp or z not in cperp or (x == 0 and z == 0):
            return False
        stab_images.append((x << N_DATA) | z)
    if _f2_rank(stab_images) != 6:
        return False
    x, z = propagate(1 << ENCODER_INPUT, 0)
    if not (x in c and x not in cperp and z in cperp):
        return False
    x, z = propagate(0, 1 << ENCODER_INPUT)
    if not (z in c and z not in cperp and x in cperp):
        return False
    return True
