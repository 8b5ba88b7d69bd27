"""ReLU-network intermediate representation.

A network is a flat DAG of scalar neurons.  Each neuron applies an affine
combination of the inputs and of earlier neurons, followed by identity or
ReLU.  This expresses layered matrices and arbitrary skip connections in
one form; layer structure, where a rewrite needs it, is recovered by
topological leveling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cpwl import Cpwl1D, affine_combination, cpwl_relu
from .rational import format_rational, parse_rational

__all__ = [
    "Neuron",
    "ReluNetwork",
    "NetworkBuilder",
    "KinkHyperplane",
    "evaluate",
    "to_cpwl",
    "classify_relu_stability",
    "Stability",
]

RELU = "relu"
ID = "id"


@dataclass(frozen=True)
class Neuron:
    bias: Fraction
    input_coeffs: tuple[tuple[int, Fraction], ...]
    neuron_coeffs: tuple[tuple[int, Fraction], ...]
    act: str

    def __post_init__(self) -> None:
        if self.act not in (RELU, ID):
            raise ValueError(f"unknown activation {self.act!r}")


@dataclass(frozen=True)
class KinkHyperplane:
    """Normal w of the hyperplane {x : w.x = 0} where ReLUs may switch."""

    w: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not any(self.w):
            raise ValueError("kink normal must be nonzero")


def _coeff_tuple(coeffs: dict[int, Fraction]) -> tuple[tuple[int, Fraction], ...]:
    return tuple(sorted((k, Fraction(v)) for k, v in coeffs.items() if v))


@dataclass(frozen=True)
class ReluNetwork:
    input_dim: int
    neurons: tuple[Neuron, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if len(self.outputs) != 1:
            raise ValueError("exactly one output neuron is supported")
        for j, nr in enumerate(self.neurons):
            for i, _ in nr.input_coeffs:
                if not 0 <= i < self.input_dim:
                    raise ValueError(f"neuron {j} references input {i}")
            for k, _ in nr.neuron_coeffs:
                if not 0 <= k < j:
                    raise ValueError(
                        f"neuron {j} references neuron {k}; only earlier neurons allowed"
                    )
        if not 0 <= self.outputs[0] < len(self.neurons):
            raise ValueError("output index out of range")

    @property
    def output(self) -> int:
        return self.outputs[0]

    def relu_indices(self) -> list[int]:
        return [j for j, nr in enumerate(self.neurons) if nr.act == RELU]

    def to_json(self) -> dict:
        neurons = []
        for nr in self.neurons:
            coeffs = {f"x{i}": format_rational(c) for i, c in nr.input_coeffs}
            coeffs.update({f"n{k}": format_rational(c) for k, c in nr.neuron_coeffs})
            neurons.append(
                {"bias": format_rational(nr.bias), "coeffs": coeffs, "act": nr.act}
            )
        return {
            "input_dim": self.input_dim,
            "neurons": neurons,
            "outputs": list(self.outputs),
        }

    @staticmethod
    def from_json(obj: dict) -> "ReluNetwork":
        neurons = []
        for spec in obj["neurons"]:
            inputs: dict[int, Fraction] = {}
            refs: dict[int, Fraction] = {}
            for key, val in spec.get("coeffs", {}).items():
                if key.startswith("x"):
                    inputs[int(key[1:])] = parse_rational(val)
                elif key.startswith("n"):
                    refs[int(key[1:])] = parse_rational(val)
                else:
                    raise ValueError(f"bad coefficient key {key!r}")
            neurons.append(
                Neuron(
                    bias=parse_rational(spec.get("bias", 0)),
                    input_coeffs=_coeff_tuple(inputs),
                    neuron_coeffs=_coeff_tuple(refs),
                    act=spec.get("act", ID),
                )
            )
        return ReluNetwork(
            input_dim=int(obj["input_dim"]),
            neurons=tuple(neurons),
            outputs=tuple(int(i) for i in obj["outputs"]),
        )


class NetworkBuilder:
    """Incremental construction; freeze with .build(output)."""

    def __init__(self, input_dim: int) -> None:
        self.input_dim = input_dim
        self._neurons: list[Neuron] = []

    def add(self, bias=0, inputs: dict | None = None, refs: dict | None = None,
            act: str = ID) -> int:
        nr = Neuron(
            bias=Fraction(bias),
            input_coeffs=_coeff_tuple(
                {int(k): Fraction(v) for k, v in (inputs or {}).items()}
            ),
            neuron_coeffs=_coeff_tuple(
                {int(k): Fraction(v) for k, v in (refs or {}).items()}
            ),
            act=act,
        )
        self._neurons.append(nr)
        return len(self._neurons) - 1

    def build(self, output: int) -> ReluNetwork:
        return ReluNetwork(
            input_dim=self.input_dim,
            neurons=tuple(self._neurons),
            outputs=(output,),
        )


def forward_values(net: ReluNetwork, x: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Exact (pre-activation, post-activation) per neuron."""
    xs = [Fraction(v) for v in x]
    if len(xs) != net.input_dim:
        raise ValueError(f"expected {net.input_dim} inputs, got {len(xs)}")
    post: list[Fraction] = []
    out = []
    for nr in net.neurons:
        v = nr.bias
        for i, c in nr.input_coeffs:
            v += c * xs[i]
        for k, c in nr.neuron_coeffs:
            v += c * post[k]
        y = max(Fraction(0), v) if nr.act == RELU else v
        post.append(y)
        out.append((v, y))
    return out


def evaluate(net: ReluNetwork, x: Sequence) -> Fraction:
    """Exact forward evaluation of the single output."""
    return forward_values(net, x)[net.output][1]


def to_cpwl(net: ReluNetwork, lo, hi) -> Cpwl1D:
    """Exact symbolic compilation of a univariate network on [lo, hi].

    Each neuron is propagated as a CPWL function; affine combinations
    merge breakpoint sets and ReLU inserts exact zero crossings.
    """
    if net.input_dim != 1:
        raise ValueError("to_cpwl needs a univariate network")
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise ValueError("to_cpwl needs a nondegenerate interval")
    ident = Cpwl1D(points=((lo, lo), (hi, hi)))
    fns: list[Cpwl1D] = []
    for nr in net.neurons:
        terms = [(c, ident) for _, c in nr.input_coeffs]
        terms += [(c, fns[k]) for k, c in nr.neuron_coeffs]
        if terms:
            f = affine_combination(terms, bias=nr.bias)
        else:
            f = Cpwl1D(points=((lo, nr.bias), (hi, nr.bias)))
        if nr.act == RELU:
            f = cpwl_relu(f)
        fns.append(f)
    return fns[net.output]


STABLY_ACTIVE = "stably_active"
STABLY_INACTIVE = "stably_inactive"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class Stability:
    neuron: int
    kind: str
    lower: Fraction
    upper: Fraction


def stability_from_bounds(j: int, lower: Fraction, upper: Fraction) -> Stability:
    # Boundary convention: l = 0 counts active, u = 0 counts inactive.
    if lower >= 0:
        kind = STABLY_ACTIVE
    elif upper <= 0:
        kind = STABLY_INACTIVE
    else:
        kind = UNSTABLE
    return Stability(neuron=j, kind=kind, lower=lower, upper=upper)


def classify_relu_stability(net: ReluNetwork, box, analyzer: str) -> list[Stability]:
    """Per-ReLU stability from the given analyzer's pre-activation bounds."""
    from .analyzers import preactivation_bounds

    bounds = preactivation_bounds(net, box, analyzer)
    return [
        stability_from_bounds(j, *bounds[j]) for j in net.relu_indices()
    ]
