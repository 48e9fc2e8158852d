"""The 21 qutrit rays: a SIC of nine vectors and four mutually unbiased bases.

Rays are kept unnormalized. Every normalized quantity (projectors, squared
overlaps) divides by the rational squared norm, so nothing leaves Q(w).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exact import ONE, OMEGA, OMEGA2, ZERO, Eisenstein, Scalar, format_rational, to_rational

DIM = 3
BASIS_NAMES = ("0", "inf", "1", "2")


class ConfigurationError(ValueError):
    """A ray set or operator violates a structural requirement."""


@dataclass(frozen=True)
class SicLabel:
    row: int
    col: int

    def short(self) -> str:
        return f"S({self.row},{self.col})"

    def to_json(self) -> dict:
        return {"kind": "SIC", "row": self.row, "col": self.col}


@dataclass(frozen=True)
class MubLabel:
    basis: str
    element: int

    def short(self) -> str:
        return f"M({self.basis},{self.element})"

    def to_json(self) -> dict:
        return {"kind": "MUB", "basis": self.basis, "element": self.element}


Label = Union[SicLabel, MubLabel]


def _label_from_json(obj: dict) -> Label:
    kind = obj.get("kind")
    if kind == "SIC":
        return SicLabel(int(obj["row"]), int(obj["col"]))
    if kind == "MUB":
        return MubLabel(str(obj["basis"]), int(obj["element"]))
    raise ConfigurationError(f"unknown ray label {obj!r}")


@dataclass(frozen=True)
class Ray:
    id: int
    label: Label
    coords: tuple[Eisenstein, ...]
    norm_sq: Fraction = field(init=False)

    def __post_init__(self) -> None:
        coords = tuple(Eisenstein.coerce(c) for c in self.coords)
        if len(coords) != DIM:
            raise ConfigurationError(f"ray {self.id}: expected {DIM} coordinates")
        object.__setattr__(self, "coords", coords)
        n = sum((c.norm_squared() for c in coords), Fraction(0))
        if n == 0:
            raise ConfigurationError(f"ray {self.id} is the zero vector")
        object.__setattr__(self, "norm_sq", n)

    @property
    def is_sic(self) -> bool:
        return isinstance(self.label, SicLabel)

    def scaled(self, c: Scalar) -> Ray:
        return Ray(self.id, self.label, tuple(Eisenstein.coerce(c) * x for x in self.coords))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "label": self.label.to_json(),
            "coords": [c.to_json() for c in self.coords],
            "normSq": format_rational(self.norm_sq),
        }


@dataclass(frozen=True)
class Basis:
    name: str
    members: tuple[int, int, int]

    def to_json(self) -> dict:
        return {"name": self.name, "members": list(self.members)}


@dataclass(frozen=True)
class Configuration:
    """An indexed ray set together with the bases hiding inside it.

    Ids must run 0..n-1 in order and labels must be unique. The paper's
    count of 9 SIC and 12 MUB rays is checked by :func:`verify_sic_mub`,
    not here, so sub-configurations remain representable.
    """

    rays: tuple[Ray, ...]
    bases: tuple[Basis, ...]

    def __post_init__(self) -> None:
        ids = [r.id for r in self.rays]
        if ids != list(range(len(self.rays))):
            raise ConfigurationError("ray ids must be 0..n-1 in order")
        if len({r.label for r in self.rays}) != len(self.rays):
            raise ConfigurationError("ray labels must be unique")
        for b in self.bases:
            if len(b.members) != DIM or len(set(b.members)) != DIM:
                raise ConfigurationError(f"basis {b.name} must have {DIM} distinct members")
            if any(not 0 <= m < len(self.rays) for m in b.members):
                raise ConfigurationError(f"basis {b.name} references an unknown ray")

    def __len__(self) -> int:
        return len(self.rays)

    @property
    def sic_ids(self) -> list[int]:
        return [r.id for r in self.rays if r.is_sic]

    @property
    def mub_ids(self) -> list[int]:
        return [r.id for r in self.rays if not r.is_sic]

    def basis(self, name: str) -> Basis:
        for b in self.bases:
            if b.name == name:
                return b
        raise KeyError(name)

    def id_of(self, label: Label) -> int:
        for r in self.rays:
            if r.label == label:
                return r.id
        raise KeyError(label)

    def subset(self, ids: Iterable[int]) -> Configuration:
        """Keep the given rays, renumbered in increasing id order; bases survive only if whole."""
        keep = sorted(set(ids))
        remap = {old: new for new, old in enumerate(keep)}
        rays = tuple(Ray(remap[i], self.rays[i].label, self.rays[i].coords) for i in keep)
        bases = tuple(
            Basis(b.name, tuple(remap[m] for m in b.members))
            for b in self.bases
            if all(m in remap for m in b.members)
        )
        return Configuration(rays, bases)

    def replace_ray(self, ray_id: int, coords: Sequence[Scalar]) -> Configuration:
        rays = list(self.rays)
        rays[ray_id] = Ray(ray_id, rays[ray_id].label, tuple(coords))
        return Configuration(tuple(rays), self.bases)

    def to_json(self) -> dict:
        return {
            "rays": [r.to_json() for r in self.rays],
            "bases": [b.to_json() for b in self.bases],
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> Configuration:
        try:
            rays = tuple(
                Ray(
                    int(r["id"]),
                    _label_from_json(r["label"]),
                    tuple(Eisenstein.from_json(c) for c in r["coords"]),
                )
                for r in obj["rays"]
            )
            bases = tuple(
                Basis(str(b["name"]), tuple(int(m) for m in b["members"]))
                for b in obj.get("bases", [])
            )
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed configuration: {exc}") from exc
        for r, raw in zip(rays, obj["rays"]):
            if "normSq" in raw and to_rational(raw["normSq"]) != r.norm_sq:
                raise ConfigurationError(f"ray {r.id}: normSq does not match coords")
        return cls(rays, bases)


def _q(k: int) -> Eisenstein:
    return (ONE, OMEGA, OMEGA2)[k % 3]


def _mub_matrices() -> dict[str, list[list[Eisenstein]]]:
    q, q2 = OMEGA, OMEGA2
    return {
        "0": [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]],
        "inf": [[ONE, ONE, ONE], [ONE, q, q2], [ONE, q2, q]],
        "1": [[ONE, q2, q2], [q2, ONE, q2], [q2, q2, ONE]],
        "2": [[ONE, q, q], [q, ONE, q], [q, q, ONE]],
    }


def build_configuration() -> Configuration:
    """The 21 rays, ids 0-8 for the SIC in row-major grid order, 9-20 for the bases."""
    rays: list[Ray] = []
    for row in range(3):
        for col in range(3):
            if row == 0:
                v = [ZERO, ONE, -_q(col)]
            elif row == 1:
                v = [-_q(col), ZERO, ONE]
            else:
                v = [ONE, -_q(col), ZERO]
            rays.append(Ray(len(rays), SicLabel(row, col), tuple(v)))
    bases: list[Basis] = []
    for name, m in _mub_matrices().items():
        members = []
        for e in range(3):
            rays.append(Ray(len(rays), MubLabel(name, e), tuple(m[i][e] for i in range(3))))
            members.append(len(rays) - 1)
        bases.append(Basis(name, tuple(members)))
    return Configuration(tuple(rays), tuple(bases))


def inner_product(u: Ray, v: Ray) -> Eisenstein:
    """<u|v>, antilinear in the first slot."""
    return sum((x.conjugate() * y for x, y in zip(u.coords, v.coords)), ZERO)


def overlap_squared(u: Ray, v: Ray) -> Fraction:
    return inner_product(u, v).norm_squared() / (u.norm_sq * v.norm_sq)


class Operator:
    """A dense square matrix over Q(w)."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[Scalar]]):
        rows = tuple(tuple(Eisenstein.coerce(x) for x in row) for row in rows)
        if any(len(row) != len(rows) for row in rows):
            raise ConfigurationError("operator must be square")
        self.rows: tuple[tuple[Eisenstein, ...], ...] = rows

    @classmethod
    def identity(cls, d: int = DIM) -> Operator:
        return cls.scalar(1, d)

    @classmethod
    def scalar(cls, c: Scalar, d: int = DIM) -> Operator:
        c = Eisenstein.coerce(c)
        return cls([[c if i == j else ZERO for j in range(d)] for i in range(d)])

    @classmethod
    def zeros(cls, d: int = DIM) -> Operator:
        return cls.scalar(0, d)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Eisenstein:
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: Operator) -> Operator:
        return Operator([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: Operator) -> Operator:
        return Operator([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> Operator:
        return Operator([[-x for x in r] for r in self.rows])

    def scale(self, c: Scalar) -> Operator:
        c = Eisenstein.coerce(c)
        return Operator([[c * x for x in r] for r in self.rows])

    def __matmul__(self, other: Operator) -> Operator:
        d = self.dim
        cols = list(zip(*other.rows))
        return Operator(
            [[sum((a * b for a, b in zip(self.rows[i], cols[j])), ZERO) for j in range(d)] for i in range(d)]
        )

    def dagger(self) -> Operator:
        d = self.dim
        return Operator([[self.rows[j][i].conjugate() for j in range(d)] for i in range(d)])

    def trace(self) -> Eisenstein:
        return sum((self.rows[i][i] for i in range(self.dim)), ZERO)

    def is_hermitian(self) -> bool:
        return self == self.dagger()

    def scalar_value(self) -> Eisenstein | None:
        """c if the operator equals c times the identity, else None."""
        c = self.rows[0][0]
        return c if self == Operator.scalar(c, self.dim) else None

    def principal_minors(self) -> list[Eisenstein]:
        out = []
        for size in range(1, self.dim + 1):
            for idx in itertools.combinations(range(self.dim), size):
                out.append(_det([[self.rows[i][j] for j in idx] for i in idx]))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Operator):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def to_json(self) -> list[list[dict[str, str]]]:
        return [[x.to_json() for x in r] for r in self.rows]

    def __repr__(self) -> str:
        return "Operator([" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows) + "])"


def _det(m: list[list[Eisenstein]]) -> Eisenstein:
    if len(m) == 1:
        return m[0][0]
    total = ZERO
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


class DensityMatrix:
    """A validated qutrit state: Hermitian, unit trace, positive semidefinite.

    Positivity is checked exactly through all principal minors, which is
    necessary and sufficient for Hermitian matrices.
    """

    __slots__ = ("op",)

    def __init__(self, op: Operator):
        if not op.is_hermitian():
            raise ValueError("density matrix must be Hermitian")
        if op.trace() != 1:
            raise ValueError(f"density matrix must have unit trace, got {op.trace()}")
        if any(m.real_part() < 0 for m in op.principal_minors()):
            raise ValueError("density matrix must be positive semidefinite")
        self.op = op

    @classmethod
    def maximally_mixed(cls, d: int = DIM) -> DensityMatrix:
        return cls(Operator.scalar(Fraction(1, d), d))

    @classmethod
    def pure(cls, v: Ray) -> DensityMatrix:
        return cls(projector(v))

    @classmethod
    def mixture(cls, weights: Sequence[Fraction], rays: Sequence[Ray]) -> DensityMatrix:
        acc = Operator.zeros()
        for w, r in zip(weights, rays):
            acc = acc + projector(r).scale(w)
        return cls(acc)

    def expectation(self, op: Operator) -> Fraction:
        """tr(rho op) for Hermitian ``op``; exact and real."""
        return (self.op @ op).trace().real_part()


def projector(v: Ray) -> Operator:
    """|v><v| / <v|v>."""
    n = v.norm_sq
    return Operator([[(x * y.conjugate()) / n for y in v.coords] for x in v.coords])


def sum_projectors(config: Configuration, ids: Iterable[int]) -> Operator:
    ids = list(ids)
    if not ids:
        raise ValueError("sum_projectors needs at least one ray")
    acc = Operator.zeros()
    for i in ids:
        acc = acc + projector(config.rays[i])
    return acc


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def verify_sic_mub(config: Configuration) -> list[Check]:
    """Exact checks of the SIC identities and of mutual unbiasedness of the bases."""
    checks: list[Check] = []
    sic = config.sic_ids
    checks.append(
        Check(
            "ray-count",
            len(sic) == 9 and len(config.mub_ids) == 12 and len(config.bases) == 4,
            f"{len(sic)} SIC rays, {len(config.mub_ids)} MUB rays, {len(config.bases)} bases",
        )
    )

    if sic:
        total = sum_projectors(config, sic)
        ok = total == Operator.scalar(3)
        checks.append(Check("sic-completeness", ok, "sum of SIC projectors = 3*1" if ok else f"got {total!r}"))
    else:
        checks.append(Check("sic-completeness", False, "no SIC rays"))

    bad = [
        (i, j, overlap_squared(config.rays[i], config.rays[j]))
        for i, j in itertools.combinations(sic, 2)
        if overlap_squared(config.rays[i], config.rays[j]) != Fraction(1, 4)
    ]
    npairs = len(sic) * (len(sic) - 1) // 2
    checks.append(
        Check(
            "sic-overlaps",
            not bad and npairs == 36,
            f"{npairs} pairs, all 1/4" if not bad else
            "; ".join(f"rays {i},{j}: {format_rational(x)}" for i, j, x in bad),
        )
    )

    for b in config.bases:
        rs = [config.rays[m] for m in b.members]
        bad_pairs = [(u.id, v.id) for u, v in itertools.combinations(rs, 2) if not inner_product(u, v).is_zero()]
        ok = not bad_pairs and sum_projectors(config, b.members) == Operator.identity()
        checks.append(
            Check(f"basis-{b.name}-orthonormal", ok, "orthonormal" if ok else f"non-orthogonal pairs {bad_pairs}")
        )

    bad = []
    ncross = 0
    for b1, b2 in itertools.combinations(config.bases, 2):
        for i in b1.members:
            for j in b2.members:
                ncross += 1
                x = overlap_squared(config.rays[i], config.rays[j])
                if x != Fraction(1, 3):
                    bad.append((i, j, x))
    checks.append(
        Check(
            "mub-unbiased",
            not bad and ncross == 54,
            f"{ncross} cross-basis pairs, all 1/3" if not bad else
            "; ".join(f"rays {i},{j}: {format_rational(x)}" for i, j, x in bad),
        )
    )
    return checks
