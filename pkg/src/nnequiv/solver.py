"""SMT-LIB 2 serialization and the external solver process driver.

The checker is solver-agnostic: any executable that reads an SMT-LIB 2
query (file argument or standard input), understands QF_LRA, and prints
``sat``/``unsat``/``unknown`` plus a ``get-model`` response works.  Each
call owns one child process; the process group is killed on timeout so no
orphan solvers survive.  Every satisfying assignment is re-checked against
the query in-process before it is reported: a model that does not evaluate
to true downgrades the verdict to a solver error.
"""

from __future__ import annotations

import logging
import os
import shlex
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

from .formula import (
    And,
    BoolConst,
    Cmp,
    Const,
    Ite,
    Not,
    Or,
    Scale,
    Sum,
    Var,
    eval_formula,
)
from .rational import ONE, ZERO, format_exact, rat
from .relations import Query

log = logging.getLogger(__name__)

SOLVER_ENV_VAR = "NNEQUIV_SOLVER"
SOLVER_ARGS_ENV_VAR = "NNEQUIV_SOLVER_ARGS"

_MEMOUT_PATTERNS = (
    "out of memory",
    "memory exhausted",
    "bad_alloc",
    "memory limit",
    "max. memory",
    "maximum memory",
    "memout",
    "memoryerror",
)


@dataclass(frozen=True)
class SolverConfig:
    """How to invoke the external solver.

    ``args_template`` is a shell-style argument string; every ``{file}``
    token is replaced by the query path.  A template without ``{file}``
    makes the driver feed the query on standard input.
    """

    executable: str
    args_template: str = "{file}"
    timeout_s: float = 600.0
    mem_limit_mib: Optional[int] = None
    keep_query_path: Optional[str] = None

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError("solver timeout must be positive")
        if self.mem_limit_mib is not None and self.mem_limit_mib <= 0:
            raise ValueError("memory limit must be positive")


def default_solver_config(**overrides) -> SolverConfig:
    executable = overrides.pop("executable", None) or os.environ.get(SOLVER_ENV_VAR, "z3")
    template = overrides.pop("args_template", None) or os.environ.get(
        SOLVER_ARGS_ENV_VAR, "{file}"
    )
    return SolverConfig(executable=executable, args_template=template, **overrides)


@dataclass(frozen=True)
class Verdict:
    """Outcome of one solver run.

    ``assignment`` is present only for ``sat`` and maps every model symbol
    to an exact rational; the resource limits in force are carried along so
    a reported memory-out or timeout is interpretable.
    """

    tag: str  # unsat | sat | timeout | memout | unknown | solver_error
    assignment: Optional[dict] = None
    wallclock_s: float = 0.0
    detail: str = ""
    timeout_s: float = 0.0
    mem_limit_mib: Optional[int] = None

    @property
    def is_sat(self) -> bool:
        return self.tag == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.tag == "unsat"

    @property
    def inconclusive(self) -> bool:
        return self.tag in ("timeout", "memout", "unknown", "solver_error")


def render_rational(value) -> str:
    """Exact SMT-LIB constant: integer or quotient, negatives in unary-minus
    form."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num) if num >= 0 else f"(- {-num})"
    body = f"(/ {abs(num)} {den})"
    return body if num >= 0 else f"(- {body})"


def render_term(term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return render_rational(term.value)
    if isinstance(term, Sum):
        if not term.terms:
            return "0"
        if len(term.terms) == 1:
            return render_term(term.terms[0])
        return "(+ " + " ".join(render_term(t) for t in term.terms) + ")"
    if isinstance(term, Scale):
        if term.coeff == ONE:
            return render_term(term.term)
        if term.coeff == -ONE:
            return f"(- {render_term(term.term)})"
        return f"(* {render_rational(term.coeff)} {render_term(term.term)})"
    if isinstance(term, Ite):
        return (
            f"(ite {render_formula(term.cond)}"
            f" {render_term(term.then)} {render_term(term.other)})"
        )
    raise TypeError(f"not a term node: {term!r}")


def render_formula(formula) -> str:
    if isinstance(formula, BoolConst):
        return "true" if formula.value else "false"
    if isinstance(formula, Cmp):
        lhs, rhs = render_term(formula.lhs), render_term(formula.rhs)
        if formula.op == "!=":
            # Negated equality for widest solver compatibility.
            return f"(not (= {lhs} {rhs}))"
        return f"({formula.op} {lhs} {rhs})"
    if isinstance(formula, And):
        if not formula.items:
            return "true"
        if len(formula.items) == 1:
            return render_formula(formula.items[0])
        return "(and " + " ".join(render_formula(f) for f in formula.items) + ")"
    if isinstance(formula, Or):
        if not formula.items:
            return "false"
        if len(formula.items) == 1:
            return render_formula(formula.items[0])
        return "(or " + " ".join(render_formula(f) for f in formula.items) + ")"
    if isinstance(formula, Not):
        return f"(not {render_formula(formula.item)})"
    raise TypeError(f"not a formula node: {formula!r}")


def serialize_smtlib(query: Query) -> str:
    """Deterministic SMT-LIB 2 text for a query: header comments, one real
    constant declaration per variable, one assertion per conjunct, then
    check-sat and get-model."""
    rel = query.relation
    epsilon = format_exact(rel.epsilon) if rel.epsilon is not None else "-"
    k = str(rel.k) if rel.k is not None else "-"
    lines = [
        f"; nnequiv relation={rel.tag} netA={query.net_a_name}"
        f" netB={query.net_b_name} epsilon={epsilon} k={k}"
    ]
    for note in query.notes:
        lines.append(f"; {note}")
    for warning in query.warnings:
        lines.append(f"; warning: {warning}")
    lines.append("(set-logic QF_LRA)")
    for name in query.declarations:
        lines.append(f"(declare-const {name} Real)")
    for conjunct in query.conjuncts:
        lines.append(f"(assert {render_formula(conjunct)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


class ModelParseError(Exception):
    pass


def _tokenize_sexpr(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "()":
            tokens.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ModelParseError("unterminated quoted symbol")
            tokens.append(text[i + 1 : j])
            i = j + 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            tokens.append(text[i : j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _parse_sexprs(tokens):
    exprs = []
    stack = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ModelParseError("unbalanced parentheses in model text")
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                exprs.append(done)
        else:
            if stack:
                stack[-1].append(tok)
            else:
                exprs.append(tok)
    if stack:
        raise ModelParseError("unbalanced parentheses in model text")
    return exprs


def _eval_value_expr(expr):
    if isinstance(expr, str):
        return rat(expr)
    if isinstance(expr, list) and expr:
        head = expr[0]
        if head == "-" and len(expr) == 2:
            return -_eval_value_expr(expr[1])
        if head == "/" and len(expr) == 3:
            return _eval_value_expr(expr[1]) / _eval_value_expr(expr[2])
        if head == "+" and len(expr) >= 2:
            total = ZERO
            for sub in expr[1:]:
                total = total + _eval_value_expr(sub)
            return total
        if head == "*" and len(expr) >= 2:
            total = ONE
            for sub in expr[1:]:
                total = total * _eval_value_expr(sub)
            return total
    raise ModelParseError(f"unsupported value expression: {expr!r}")


def parse_model(text: str) -> dict:
    """Extract ``name -> rational`` from a get-model response.

    Handles integer, decimal, quotient, and unary-minus forms (nested
    combinations included); entries that are not zero-arity real constants
    are skipped with a warning.
    """
    exprs = _parse_sexprs(_tokenize_sexpr(text))
    # A get-model response is one parenthesized list, optionally tagged
    # with the legacy `model` symbol.
    entries = []
    for expr in exprs:
        if isinstance(expr, list):
            body = expr[1:] if expr[:1] == ["model"] else expr
            entries.extend(e for e in body if isinstance(e, list))
    assignment = {}
    for entry in entries:
        if not entry or entry[0] != "define-fun" or len(entry) < 5:
            log.warning("ignoring unrecognized model entry: %r", entry)
            continue
        name, params, sort = entry[1], entry[2], entry[3]
        if params != [] or sort not in ("Real", "Int"):
            log.warning("ignoring non-constant model entry for %r", name)
            continue
        try:
            assignment[str(name)] = _eval_value_expr(entry[4])
        except (ModelParseError, ValueError, ZeroDivisionError) as exc:
            raise ModelParseError(f"cannot evaluate model value for {name}: {exc}") from exc
    return assignment


def _apply_child_limits(mem_limit_mib):
    def setup():
        os.setsid()
        if mem_limit_mib is not None:
            import resource

            limit = mem_limit_mib * 1024 * 1024
            resource.setrlimit(resource.RLIMIT_AS, (limit, limit))

    return setup


def _looks_like_memout(output: str, cfg: SolverConfig, returncode) -> bool:
    lowered = output.lower()
    if any(pat in lowered for pat in _MEMOUT_PATTERNS):
        return True
    if cfg.mem_limit_mib is not None and returncode is not None and returncode < 0:
        # Killed by a signal under an address-space cap: treat as memory-out.
        return returncode in (-signal.SIGKILL, -signal.SIGABRT, -signal.SIGSEGV)
    return False


def check_assignment(query: Query, assignment: dict) -> Optional[str]:
    """Re-evaluate the query under a parsed model; returns a failure
    description or None when every conjunct holds."""
    for name in query.input_vars:
        if name not in assignment:
            return f"model is missing input variable {name}"
    try:
        for conjunct in query.conjuncts:
            if not eval_formula(conjunct, assignment):
                return f"model does not satisfy conjunct: {render_formula(conjunct)[:200]}"
    except KeyError as exc:
        return f"model is missing variable {exc.args[0]}"
    return None


def run_solver(query: Query, cfg: SolverConfig) -> Verdict:
    """Serialize, invoke the solver process, and map its output to a verdict."""
    text = serialize_smtlib(query)
    cleanup = None
    if cfg.keep_query_path:
        path = cfg.keep_query_path
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        fd, path = tempfile.mkstemp(suffix=".smt2", prefix="nnequiv_")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        cleanup = path

    args = [tok.replace("{file}", path) for tok in shlex.split(cfg.args_template)]
    use_stdin = "{file}" not in cfg.args_template
    argv = [cfg.executable] + args

    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE if use_stdin else subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            preexec_fn=_apply_child_limits(cfg.mem_limit_mib),
            text=True,
        )
    except OSError as exc:
        if cleanup:
            os.unlink(cleanup)
        return Verdict(
            tag="solver_error",
            detail=f"cannot start solver {cfg.executable!r}: {exc}",
            timeout_s=cfg.timeout_s,
            mem_limit_mib=cfg.mem_limit_mib,
        )
    try:
        stdout, stderr = proc.communicate(
            input=text if use_stdin else None, timeout=cfg.timeout_s
        )
    except subprocess.TimeoutExpired:
        _kill_process_group(proc)
        wall = time.monotonic() - start
        if cleanup:
            os.unlink(cleanup)
        return Verdict(
            tag="timeout",
            wallclock_s=wall,
            detail=f"solver exceeded {cfg.timeout_s} s and was killed",
            timeout_s=cfg.timeout_s,
            mem_limit_mib=cfg.mem_limit_mib,
        )
    finally:
        if proc.poll() is None:
            _kill_process_group(proc)
    wall = time.monotonic() - start
    if cleanup:
        os.unlink(cleanup)

    def verdict(tag, **kw):
        return Verdict(
            tag=tag,
            wallclock_s=wall,
            timeout_s=cfg.timeout_s,
            mem_limit_mib=cfg.mem_limit_mib,
            **kw,
        )

    lines = stdout.splitlines()
    answer_idx = next((i for i, ln in enumerate(lines) if ln.strip()), None)
    answer = lines[answer_idx].strip() if answer_idx is not None else ""
    if answer == "unsat":
        return verdict("unsat")
    if answer == "sat":
        rest = "\n".join(lines[answer_idx + 1 :])
        try:
            assignment = parse_model(rest)
        except ModelParseError as exc:
            return verdict("solver_error", detail=f"unparseable model: {exc}")
        failure = check_assignment(query, assignment)
        if failure is not None:
            return verdict(
                "solver_error",
                detail=f"model round-trip check failed: {failure}",
            )
        return verdict("sat", assignment=assignment)
    combined = stdout + "\n" + stderr
    if _looks_like_memout(combined, cfg, proc.returncode):
        return verdict("memout", detail=_tail(combined))
    if answer == "unknown":
        return verdict("unknown", detail=_tail(stderr))
    return verdict(
        "solver_error",
        detail=f"unrecognized solver output (exit {proc.returncode}): {_tail(combined)}",
    )


def _kill_process_group(proc) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    try:
        proc.wait(timeout=10)
    except subprocess.TimeoutExpired:  # pragma: no cover - kernel-level stall
        pass


def _tail(text: str, limit: int = 500) -> str:
    text = text.strip()
    return text if len(text) <= limit else "..." + text[-limit:]


def solver_identity(cfg: SolverConfig) -> str:
    """Best-effort version string of the configured solver."""
    try:
        out = subprocess.run(
            [cfg.executable, "--version"],
            capture_output=True,
            text=True,
            timeout=10,
        )
        first = (out.stdout or out.stderr).strip().splitlines()
        if first:
            return first[0]
    except (OSError, subprocess.TimeoutExpired):
        pass
    return os.path.basename(cfg.executable)
