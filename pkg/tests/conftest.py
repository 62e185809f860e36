"""Shared fixtures: checked-in models, solver resolution, random net generation."""

from __future__ import annotations

import os
import random
import shutil
from pathlib import Path

import pytest

from nnequiv.model import Activation, Layer, Network, load_network_file
from nnequiv.rational import rat
from nnequiv.solver import default_solver_config

REPO = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
SHIM = REPO / "tools" / "z3wasm" / "z3smt2.cjs"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture(scope="session")
def fig1():
    return load_network_file(fixture_path("fig1.json"))


@pytest.fixture(scope="session")
def fig1_pert():
    return load_network_file(fixture_path("fig1_pert.json"))


@pytest.fixture(scope="session")
def bitvec_1_1():
    return load_network_file(fixture_path("bitvec_1_1.json"))


@pytest.fixture(scope="session")
def mpc_net():
    return load_network_file(fixture_path("mpc.json"))


def resolve_solver():
    """Solver executable: environment override, a solver on PATH, then the
    bundled WebAssembly shim."""
    exe = os.environ.get("NNEQUIV_SOLVER")
    if exe:
        return exe
    for candidate in ("z3", "cvc5"):
        found = shutil.which(candidate)
        if found:
            return found
    if SHIM.exists() and (SHIM.parent / "node_modules").is_dir() and shutil.which("node"):
        return str(SHIM)
    return None


@pytest.fixture(scope="session")
def solver_exe():
    exe = resolve_solver()
    if exe is None:
        pytest.skip(
            "no SMT solver available; set NNEQUIV_SOLVER or run"
            " `npm install` in tools/z3wasm"
        )
    return exe


@pytest.fixture(scope="session")
def solver_cfg(solver_exe):
    def factory(**overrides):
        overrides.setdefault("timeout_s", 120.0)
        return default_solver_config(executable=solver_exe, **overrides)

    return factory


@pytest.fixture
def solver_env(solver_exe, monkeypatch):
    """Point the CLI's default solver at the resolved executable."""
    monkeypatch.setenv("NNEQUIV_SOLVER", solver_exe)
    return solver_exe


def random_network(
    rng: random.Random,
    name: str,
    input_dim: int,
    hidden,
    output_dim: int,
    *,
    hidden_activation: Activation = Activation.RELU,
    output_activation: Activation = Activation.LINEAR,
    bounds: str = "unit",  # "unit" | "none" | "box"
    spread: float = 1.0,
    digits: int = 3,
    output_scale=None,
) -> Network:
    """Small random net with exact decimal weights, for property tests."""

    def value():
        return rat(f"{rng.uniform(-spread, spread):.{digits}f}")

    def layer(rows, cols, activation):
        return Layer(
            weights=tuple(tuple(value() for _ in range(cols)) for _ in range(rows)),
            biases=tuple(value() for _ in range(cols)),
            activation=activation,
        )

    dims = [input_dim] + list(hidden) + [output_dim]
    layers = []
    for i in range(len(dims) - 1):
        is_last = i == len(dims) - 2
        layers.append(layer(dims[i], dims[i + 1], output_activation if is_last else hidden_activation))
    if bounds == "unit":
        input_bounds = tuple((rat(0), rat(1)) for _ in range(input_dim))
    elif bounds == "box":
        input_bounds = []
        for _ in range(input_dim):
            lo = rat(f"{rng.uniform(-1.5, 0):.2f}")
            hi = lo + rat(f"{rng.uniform(0.5, 2.0):.2f}")
            input_bounds.append((lo, hi))
        input_bounds = tuple(input_bounds)
    else:
        input_bounds = tuple(None for _ in range(input_dim))
    return Network(
        name=name,
        input_dim=input_dim,
        layers=tuple(layers),
        input_bounds=input_bounds,
        output_scale=output_scale,
    )


def random_point_in_bounds(rng: random.Random, net: Network, digits: int = 3):
    """Exact rational point inside the declared bounds (unbounded features
    draw from [-1, 1])."""
    point = []
    for bound in net.input_bounds:
        if bound is None:
            point.append(rat(f"{rng.uniform(-1, 1):.{digits}f}"))
        else:
            lo, hi = float(bound[0]), float(bound[1])
            value = rat(f"{rng.uniform(lo, hi):.{digits}f}")
            point.append(min(max(value, bound[0]), bound[1]))
    return tuple(point)
