#!/usr/bin/env python3
"""Regenerate the checked-in model fixtures (seeded, deterministic).

The files under tests/fixtures/ are the authoritative artifacts; this script
only exists so they can be rebuilt from scratch. fig1.json and
fig1_pert.json are hand-written and not touched here.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nnequiv.model import Activation, Layer, Network, serialize_network, validate
from nnequiv.rational import rat

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def random_layer(rng, rows, cols, activation, digits=3, spread="0.5"):
    lo, hi = -float(rat(spread)), float(rat(spread))
    weights = tuple(
        tuple(rat(f"{rng.uniform(lo, hi):.{digits}f}") for _ in range(cols))
        for _ in range(rows)
    )
    biases = tuple(rat(f"{rng.uniform(lo, hi):.{digits}f}") for _ in range(cols))
    return Layer(weights=weights, biases=biases, activation=activation)


def box_bounds(pairs):
    return tuple((rat(lo), rat(hi)) for lo, hi in pairs)


def write(net, filename):
    assert validate(net) == [], validate(net)
    path = FIXTURES / filename
    path.write_text(serialize_network(net))
    print(f"wrote {path}")


def main():
    rng = random.Random(20240001)
    # Bit-vector classifier shape, first architecture row: 10-10-2, 132 params.
    bitvec = Network(
        name="bitvec_1_1",
        input_dim=10,
        layers=(
            random_layer(rng, 10, 10, Activation.RELU),
            random_layer(rng, 10, 2, Activation.LINEAR),
        ),
        input_bounds=box_bounds([("0", "1")] * 10),
    )
    write(bitvec, "bitvec_1_1.json")

    rng = random.Random(20240002)
    # Image classifier shape, first architecture row: 784-10-10, 7960 params.
    mnist = Network(
        name="mnist_1_1",
        input_dim=784,
        layers=(
            random_layer(rng, 784, 10, Activation.RELU, spread="0.1"),
            random_layer(rng, 10, 10, Activation.LINEAR),
        ),
        input_bounds=box_bounds([("0", "1")] * 784),
    )
    write(mnist, "mnist_1_1.json")

    rng = random.Random(20240003)
    # Regression controller shape: 6-45-45-45-1, hard-tanh output, 1.04 scale.
    mpc = Network(
        name="mpc_fixture",
        input_dim=6,
        layers=(
            random_layer(rng, 6, 45, Activation.RELU, spread="0.4"),
            random_layer(rng, 45, 45, Activation.RELU, spread="0.25"),
            random_layer(rng, 45, 45, Activation.RELU, spread="0.25"),
            random_layer(rng, 45, 1, Activation.HARDTANH, spread="0.25"),
        ),
        input_bounds=box_bounds(
            [
                ("-2", "2"),
                ("-1.04", "1.04"),
                ("-1", "1"),
                ("-0.8", "0.8"),
                ("-1.04", "1.04"),
                ("-0.01", "0.01"),
            ]
        ),
        output_scale=rat("1.04"),
    )
    write(mpc, "mpc.json")


if __name__ == "__main__":
    main()
