"""
Line-oriented instance files::

    mode limited        # or: mode unlimited
    r 100               # required iff limited
    liar 1              # 1-based agent index
    agent 1: 17.67 12.58 4.35 ...
    agent 2: ...
    truth 1: ...        # optional, defaults to the liar's agent row

Everything after '#' is a comment. Agent rows are numbered 1..n in order.
"""
import logging
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from fairlie.config import settings
from fairlie.errors import InstanceSyntaxError, InstanceValidationError
from fairlie.models import (
    PreferenceProfile,
    PreferenceVector,
    ProblemInstance,
    Scenario,
    ScenarioMode,
)
from fairlie.tools.welfare import validate_instance

logger = logging.getLogger(__name__)

_ROW = re.compile(r"^(agent|truth)\s+(\S+?)\s*:(.*)$")
_TOKEN = re.compile(r"\S+")

Row = Tuple[int, List[float]]


def _number(text: str, line: int, column: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InstanceSyntaxError(line, column, f"{what}: '{text}' is not a number")
    if not math.isfinite(value):
        raise InstanceSyntaxError(line, column, f"{what}: '{text}' is not finite")
    return value


def _index(text: str, line: int, column: int, what: str) -> int:
    if not text.isdigit() or int(text) < 1:
        raise InstanceSyntaxError(line, column, f"{what}: '{text}' is not a 1-based index")
    return int(text)


def _values(body: str, offset: int, line: int, expected: Optional[int], what: str) -> List[float]:
    tokens = list(_TOKEN.finditer(body))
    values = [_number(t.group(), line, offset + t.start() + 1, what) for t in tokens]
    if expected is not None and len(values) != expected:
        if len(values) > expected:
            column = offset + tokens[expected].start() + 1
        else:
            column = offset + len(body.rstrip()) + 1
        raise InstanceSyntaxError(line, column, f"{what}: expected {expected} values, found {len(values)}")
    if not values:
        raise InstanceSyntaxError(line, offset + 1, f"{what}: no values")
    return values


def parse_instance(text: str, lenient: bool = False) -> ProblemInstance:
    """
    Parse and validate an instance file.

    ``lenient`` relaxes the limited-mode sum check to ``PUBLISHED_TOLERANCE`` so
    that published tables with rounded entries load as printed.
    """
    header: Dict[str, Tuple[str, int, int]] = {}
    agents: List[Row] = []
    truth: Optional[Tuple[int, List[float], int]] = None
    m: Optional[int] = None
    last_line = 0

    for number, raw in enumerate(text.splitlines(), start=1):
        last_line = number
        content = raw.split("#", 1)[0].rstrip()
        if not content.strip():
            continue
        indent = len(content) - len(content.lstrip())
        content = content.strip()

        match = _ROW.match(content)
        if match:
            kind, label, body = match.groups()
            label_col = indent + match.start(2) + 1
            offset = indent + match.start(3)
            idx = _index(label, number, label_col, kind)
            values = _values(body, offset, number, m, f"{kind} {label}")
            if m is None:
                m = len(values)
            if kind == "agent":
                if idx != len(agents) + 1:
                    raise InstanceSyntaxError(number, label_col, f"expected agent {len(agents) + 1}, found agent {idx}")
                agents.append((idx, values))
            else:
                if truth is not None:
                    raise InstanceSyntaxError(number, indent + 1, "duplicate truth row")
                truth = (idx, values, number)
            continue

        tokens = content.split()
        key = tokens[0]
        if key not in ("mode", "r", "liar"):
            raise InstanceSyntaxError(number, indent + 1, f"unknown directive '{key}'")
        if key in header:
            raise InstanceSyntaxError(number, indent + 1, f"duplicate '{key}' directive")
        if len(tokens) != 2:
            raise InstanceSyntaxError(number, indent + 1, f"'{key}' takes exactly one argument")
        value_col = indent + content.index(tokens[1], len(key)) + 1
        header[key] = (tokens[1], number, value_col)

    if "mode" not in header:
        raise InstanceSyntaxError(last_line + 1, 1, "missing 'mode' directive")
    mode_text, mode_line, mode_col = header["mode"]
    try:
        mode = ScenarioMode(mode_text)
    except ValueError:
        raise InstanceSyntaxError(mode_line, mode_col, f"mode must be 'limited' or 'unlimited', got '{mode_text}'")

    if mode == ScenarioMode.LIMITED:
        if "r" not in header:
            raise InstanceSyntaxError(mode_line, 1, "limited mode requires an 'r' directive")
        r_text, r_line, r_col = header["r"]
        r = _number(r_text, r_line, r_col, "r")
        if r <= 0:
            raise InstanceSyntaxError(r_line, r_col, f"r must be positive, got {r_text}")
        scenario = Scenario.limited(r)
    else:
        if "r" in header:
            raise InstanceSyntaxError(header["r"][1], header["r"][2], "'r' is only allowed in limited mode")
        scenario = Scenario.unlimited()

    if len(agents) < 2:
        raise InstanceSyntaxError(last_line + 1, 1, f"need at least two agent rows, found {len(agents)}")

    liar = 1
    if "liar" in header:
        liar_text, liar_line, liar_col = header["liar"]
        liar = _index(liar_text, liar_line, liar_col, "liar")
        if liar > len(agents):
            raise InstanceSyntaxError(liar_line, liar_col, f"liar {liar} is not one of the {len(agents)} agents")

    profile = PreferenceProfile(
        rows=tuple(PreferenceVector.of(values) for _, values in agents),
        scenario=scenario,
    )
    truth_vector = None
    if truth is not None:
        idx, values, line = truth
        if idx != liar:
            raise InstanceSyntaxError(line, 7, f"truth row is for agent {idx}, but the liar is agent {liar}")
        truth_vector = PreferenceVector.of(values)

    try:
        inst = ProblemInstance.create(profile, liar=liar - 1, truth=truth_vector)
    except ValidationError as e:
        raise InstanceSyntaxError(last_line + 1, 1, str(e))

    violations = validate_instance(inst, tolerance=settings.PUBLISHED_TOLERANCE if lenient else None)
    if violations:
        raise InstanceValidationError(violations)
    return inst


def emit_instance(inst: ProblemInstance) -> str:
    scenario = inst.scenario
    lines = [f"mode {scenario.mode.value}"]
    if scenario.is_limited:
        lines.append(f"r {scenario.r!r}")
    lines.append(f"liar {inst.liar + 1}")
    for i, row in enumerate(inst.profile.rows, start=1):
        lines.append(f"agent {i}: " + " ".join(repr(v) for v in row.values))
    if inst.truth != inst.reported:
        lines.append(f"truth {inst.liar + 1}: " + " ".join(repr(v) for v in inst.truth.values))
    return "\n".join(lines) + "\n"


def load_instance(path: str, lenient: bool = False) -> ProblemInstance:
    text = Path(path).read_text(encoding="utf-8")
    inst = parse_instance(text, lenient=lenient)
    logger.info(
        f"[Instance] Loaded {path}: {inst.profile.n_agents} agents, {inst.profile.n_resources} resources, "
        f"{inst.scenario.label()}, liar {inst.liar + 1}"
    )
    return inst


def save_instance(inst: ProblemInstance, path: str) -> None:
    Path(path).write_text(emit_instance(inst), encoding="utf-8")
    logger.info(f"[Instance] Saved {path}")
