"""Sound-and-complete equivalence checking of feedforward neural networks.

The pipeline: load two exact-rational network descriptions, compile them and
the negation of a chosen equivalence relation into one quantifier-free
linear-real-arithmetic query, hand it to an external SMT-LIB 2 solver
process, and certify any counterexample by exact replay through both
networks.
"""

from .certify import Counterexample, CounterexampleRejection, certify, extract_input
from .evaluator import argmax, argsort, distance, forward, relation_violated_at
from .model import (
    Activation,
    Layer,
    ModelError,
    ModelFormatError,
    ModelValidationError,
    Network,
    load_network,
    load_network_file,
    param_count,
    serialize_network,
    validate,
)
from .oracle import DiscreteDomain, exhaustive_check
from .perturb import PerturbationSpec, perturb
from .rational import BACKEND, Rational, format_exact, rat
from .relations import EquivalenceRelation, Query, build_query
from .solver import SolverConfig, Verdict, parse_model, run_solver, serialize_smtlib

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "BACKEND",
    "Counterexample",
    "CounterexampleRejection",
    "DiscreteDomain",
    "EquivalenceRelation",
    "Layer",
    "ModelError",
    "ModelFormatError",
    "ModelValidationError",
    "Network",
    "PerturbationSpec",
    "Query",
    "Rational",
    "SolverConfig",
    "Verdict",
    "argmax",
    "argsort",
    "build_query",
    "certify",
    "distance",
    "exhaustive_check",
    "extract_input",
    "forward",
    "format_exact",
    "load_network",
    "load_network_file",
    "param_count",
    "parse_model",
    "perturb",
    "rat",
    "relation_violated_at",
    "run_solver",
    "serialize_network",
    "serialize_smtlib",
    "validate",
]
