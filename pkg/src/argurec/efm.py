"""Explicit-factor matrix factorization over ratings, attention and quality.

Five nonnegative factor matrices are fit jointly:

    ratings     A (m x n)  ~  U1 @ U2.T + H1 @ H2.T
    attention   X (m x p)  ~  U1 @ V.T
    quality     Y (n x p)  ~  U2 @ V.T

with p = 10 feature categories. X and Y are consolidated from sentence-level
sentiment: for user i and feature j with t mentions,

    X_ij = 1 + (N-1) * (2 / (1 + exp(-t)) - 1)

and for item i, feature j with t non-neutral mentions of average sign
s = (pos - neg) / t,

    Y_ij = 1 + (N-1) / (1 + exp(-t * s))

on the N = 5 rating scale. Training minimizes the masked squared error

    J = sum_A (A - A_hat)^2 + lx * sum_X (X - X_hat)^2 + ly * sum_Y (Y - Y_hat)^2
        + lu * (|U1|^2 + |U2|^2) + lh * (|H1|^2 + |H2|^2) + lv * |V|^2

by projected alternating gradient descent with a step-halving safeguard, so
the per-epoch objective is non-increasing and runs are deterministic for a
fixed seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import ALL_CATEGORIES, Polarity, Review, SentenceRecord

RATING_SCALE = 5  # N: ratings and consolidated values live on 1..N
N_FEATURES = len(ALL_CATEGORIES)

_FACTOR_NAMES = ("U1", "U2", "V", "H1", "H2")
_MAX_HALVINGS = 20


class DimensionMismatch(Exception):
    pass


class IndexOutOfRange(Exception):
    pass


class EmptyHoldout(Exception):
    pass


class ModelNotTrained(Exception):
    pass


class CheckpointVersionError(Exception):
    """Checkpoint file has the wrong version or an invalid structure."""


class IndexTable:
    """Bijective id <-> dense-index table, in first-seen order."""

    def __init__(self, ids: Iterable[str] = ()):
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        for i in ids:
            self.add(i)

    def add(self, id_: str) -> int:
        if id_ not in self._index:
            self._index[id_] = len(self._ids)
            self._ids.append(id_)
        return self._index[id_]

    def index(self, id_: str) -> int:
        return self._index[id_]

    def get(self, id_: str) -> Optional[int]:
        return self._index.get(id_)

    def id(self, index: int) -> str:
        return self._ids[index]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._ids)

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, id_: str) -> bool:
        return id_ in self._index


@dataclass
class RatingMatrix:
    """Sparse user x item ratings with id tables."""

    user_ids: IndexTable
    item_ids: IndexTable
    entries: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.user_ids)

    @property
    def n(self) -> int:
        return len(self.item_ids)

    @classmethod
    def from_reviews(cls, reviews: Sequence[Review]) -> "RatingMatrix":
        """Index users and items in first-seen order; a repeated (user, item)
        pair keeps the rating of the later review."""
        users, items = IndexTable(), IndexTable()
        entries: dict[tuple[int, int], float] = {}
        for r in reviews:
            if not 1 <= r.rating <= RATING_SCALE:
                raise ValueError(f"rating {r.rating} outside 1..{RATING_SCALE}")
            entries[(users.add(r.user_id), items.add(r.item_id))] = float(r.rating)
        return cls(user_ids=users, item_ids=items, entries=entries)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return _dense(self.entries, self.m, self.n)


@dataclass
class AttentionMatrix:
    """Sparse user x feature attention values in (1, 5]."""

    m: int
    entries: dict[tuple[int, int], float] = field(default_factory=dict)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return _dense(self.entries, self.m, N_FEATURES)


@dataclass
class QualityMatrix:
    """Sparse item x feature quality values in (1, 5], plus opinion counts."""

    n: int
    entries: dict[tuple[int, int], float] = field(default_factory=dict)
    counts: dict[tuple[int, int], tuple[int, int, int]] = field(default_factory=dict)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return _dense(self.entries, self.n, N_FEATURES)


def _dense(entries, rows, cols):
    values = np.zeros((rows, cols))
    mask = np.zeros((rows, cols), dtype=bool)
    for (i, j), v in entries.items():
        values[i, j] = v
        mask[i, j] = True
    return values, mask


def attention_value(t: int) -> float:
    """Map a mention count t >= 1 onto the (1, 5] attention scale."""
    return 1.0 + (RATING_SCALE - 1) * (2.0 / (1.0 + math.exp(-t)) - 1.0)


def quality_value(pos: int, neg: int) -> float:
    """Map (positive, negative) counts onto the (1, 5) quality scale."""
    t = pos + neg
    s = (pos - neg) / t
    return 1.0 + (RATING_SCALE - 1) / (1.0 + math.exp(-t * s))


def build_attention_matrix(
    records: Sequence[SentenceRecord], users: IndexTable
) -> AttentionMatrix:
    """Consolidate per-user feature mention counts (any polarity) into X."""
    counts: dict[tuple[int, int], int] = {}
    for rec in records:
        if rec.feature is None:
            continue
        if rec.user_id not in users:
            raise KeyError(f"record user {rec.user_id!r} not in the user table")
        key = (users.index(rec.user_id), int(rec.feature))
        counts[key] = counts.get(key, 0) + 1
    entries = {key: attention_value(t) for key, t in counts.items()}
    return AttentionMatrix(m=len(users), entries=entries)


def build_quality_matrix(
    records: Sequence[SentenceRecord], items: IndexTable
) -> QualityMatrix:
    """Consolidate per-item feature sentiment into Y; neutral sentences are
    counted but carry no signal, so all-neutral cells stay unobserved."""
    counts: dict[tuple[int, int], list[int]] = {}
    for rec in records:
        if rec.feature is None:
            continue
        if rec.item_id not in items:
            raise KeyError(f"record item {rec.item_id!r} not in the item table")
        key = (items.index(rec.item_id), int(rec.feature))
        pos, neg, neu = counts.setdefault(key, [0, 0, 0])
        if rec.polarity is Polarity.POSITIVE:
            counts[key][0] = pos + 1
        elif rec.polarity is Polarity.NEGATIVE:
            counts[key][1] = neg + 1
        else:
            counts[key][2] = neu + 1
    entries = {}
    for key, (pos, neg, _neu) in counts.items():
        if pos + neg > 0:
            entries[key] = quality_value(pos, neg)
    return QualityMatrix(
        n=len(items),
        entries=entries,
        counts={k: (c[0], c[1], c[2]) for k, c in counts.items()},
    )


@dataclass(frozen=True)
class Hyperparams:
    r: int = 5
    r_h: int = 5
    lambda_x: float = 1.0
    lambda_y: float = 1.0
    lambda_u: float = 0.01
    lambda_h: float = 0.01
    lambda_v: float = 0.01
    learning_rate: float = 0.005
    max_epochs: int = 500
    seed: int = 42
    tol: float = 1e-6

    def __post_init__(self):
        if self.r < 1 or self.r_h < 0:
            raise ValueError("r must be >= 1 and r_h >= 0")
        for name in ("lambda_x", "lambda_y", "lambda_u", "lambda_h", "lambda_v"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.learning_rate <= 0 or self.max_epochs < 0 or self.tol <= 0:
            raise ValueError("learning_rate and tol must be positive, max_epochs >= 0")

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "r_h": self.r_h,
            "lambda_x": self.lambda_x,
            "lambda_y": self.lambda_y,
            "lambda_u": self.lambda_u,
            "lambda_h": self.lambda_h,
            "lambda_v": self.lambda_v,
            "learning_rate": self.learning_rate,
            "max_epochs": self.max_epochs,
            "seed": self.seed,
            "tol": self.tol,
        }


@dataclass
class EfmModel:
    U1: np.ndarray
    U2: np.ndarray
    V: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    hyperparams: Hyperparams
    user_ids: IndexTable
    item_ids: IndexTable
    training_log: list[float] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.U1.shape[0]

    @property
    def n(self) -> int:
        return self.U2.shape[0]

    def factors(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _FACTOR_NAMES}


class _DenseProblem:
    """Dense views of A, X, Y plus hyperparameters, shared by the objective,
    the gradients and the training loop."""

    def __init__(self, A: RatingMatrix, X: AttentionMatrix, Y: QualityMatrix,
                 h: Hyperparams):
        if X.m != A.m or Y.n != A.n:
            raise DimensionMismatch(
                f"A is {A.m}x{A.n} but X has {X.m} users and Y has {Y.n} items"
            )
        self.A, self.A_mask = A.dense()
        self.X, self.X_mask = X.dense()
        self.Y, self.Y_mask = Y.dense()
        self.h = h
        self.m, self.n = A.m, A.n

    def objective(self, f: dict[str, np.ndarray]) -> float:
        h = self.h
        e_a = self.A_mask * (f["U1"] @ f["U2"].T + f["H1"] @ f["H2"].T - self.A)
        e_x = self.X_mask * (f["U1"] @ f["V"].T - self.X)
        e_y = self.Y_mask * (f["U2"] @ f["V"].T - self.Y)
        return float(
            np.sum(e_a**2)
            + h.lambda_x * np.sum(e_x**2)
            + h.lambda_y * np.sum(e_y**2)
            + h.lambda_u * (np.sum(f["U1"] ** 2) + np.sum(f["U2"] ** 2))
            + h.lambda_h * (np.sum(f["H1"] ** 2) + np.sum(f["H2"] ** 2))
            + h.lambda_v * np.sum(f["V"] ** 2)
        )

    def gradients(self, f: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        h = self.h
        e_a = self.A_mask * (f["U1"] @ f["U2"].T + f["H1"] @ f["H2"].T - self.A)
        e_x = self.X_mask * (f["U1"] @ f["V"].T - self.X)
        e_y = self.Y_mask * (f["U2"] @ f["V"].T - self.Y)
        return {
            "U1": 2 * (e_a @ f["U2"] + h.lambda_x * (e_x @ f["V"]) + h.lambda_u * f["U1"]),
            "U2": 2 * (e_a.T @ f["U1"] + h.lambda_y * (e_y @ f["V"]) + h.lambda_u * f["U2"]),
            "V": 2 * (h.lambda_x * (e_x.T @ f["U1"]) + h.lambda_y * (e_y.T @ f["U2"])
                      + h.lambda_v * f["V"]),
            "H1": 2 * (e_a @ f["H2"] + h.lambda_h * f["H1"]),
            "H2": 2 * (e_a.T @ f["H1"] + h.lambda_h * f["H2"]),
        }


def _init_factors(m: int, n: int, h: Hyperparams) -> dict[str, np.ndarray]:
    # fixed draw order U1, U2, V, H1, H2 keeps runs seed-reproducible
    rng = np.random.default_rng(h.seed)
    return {
        "U1": rng.uniform(0.01, 1.0, (m, h.r)),
        "U2": rng.uniform(0.01, 1.0, (n, h.r)),
        "V": rng.uniform(0.01, 1.0, (N_FEATURES, h.r)),
        "H1": rng.uniform(0.01, 1.0, (m, h.r_h)),
        "H2": rng.uniform(0.01, 1.0, (n, h.r_h)),
    }


def train(A: RatingMatrix, X: AttentionMatrix, Y: QualityMatrix,
          h: Hyperparams) -> EfmModel:
    """Fit the five factor matrices by projected alternating gradient descent.

    Each epoch cycles U1 -> U2 -> V -> H1 -> H2. A factor step that would
    increase the objective is halved up to 20 times, then skipped, so the
    logged objective never increases. Non-convergence within max_epochs is
    not an error; the best (= last) iterate is returned.
    """
    problem = _DenseProblem(A, X, Y, h)
    factors = _init_factors(A.m, A.n, h)
    current = problem.objective(factors)
    log = [current]
    for _ in range(h.max_epochs):
        previous = current
        for name in _FACTOR_NAMES:
            if factors[name].size == 0:
                continue
            grad = problem.gradients(factors)[name]
            step = h.learning_rate
            for _halving in range(_MAX_HALVINGS + 1):
                candidate = np.maximum(factors[name] - step * grad, 0.0)
                value = problem.objective(factors | {name: candidate})
                if value <= current:
                    factors[name] = candidate
                    current = value
                    break
                step *= 0.5
            # all halvings failed: leave this factor unchanged
        log.append(current)
        if previous <= 0.0 or (previous - current) / previous < h.tol:
            break
    return EfmModel(
        **factors,
        hyperparams=h,
        user_ids=A.user_ids,
        item_ids=A.item_ids,
        training_log=log,
    )


def objective(model: EfmModel, A: RatingMatrix, X: AttentionMatrix,
              Y: QualityMatrix) -> float:
    """The training objective J of a model on the given data (J >= 0)."""
    problem = _DenseProblem(A, X, Y, model.hyperparams)
    _check_model_dims(model, problem)
    return problem.objective(model.factors())


def gradients(model: EfmModel, A: RatingMatrix, X: AttentionMatrix,
              Y: QualityMatrix) -> dict[str, np.ndarray]:
    """Analytic gradient of J with respect to each factor matrix."""
    problem = _DenseProblem(A, X, Y, model.hyperparams)
    _check_model_dims(model, problem)
    return problem.gradients(model.factors())


def _check_model_dims(model: EfmModel, problem: _DenseProblem) -> None:
    if model.m != problem.m or model.n != problem.n:
        raise DimensionMismatch(
            f"model is {model.m}x{model.n}, data is {problem.m}x{problem.n}"
        )


def predict_rating(model: EfmModel, user_index: int, item_index: int) -> float:
    """Unclamped predicted rating; see rating_to_circles for display."""
    if not 0 <= user_index < model.m:
        raise IndexOutOfRange(f"user index {user_index} not in 0..{model.m - 1}")
    if not 0 <= item_index < model.n:
        raise IndexOutOfRange(f"item index {item_index} not in 0..{model.n - 1}")
    value = float(model.U1[user_index] @ model.U2[item_index])
    if model.H1.size:
        value += float(model.H1[user_index] @ model.H2[item_index])
    return value


def predict_attention(model: EfmModel, user_index: int) -> np.ndarray:
    """Predicted attention over the 10 feature categories for one user."""
    if not 0 <= user_index < model.m:
        raise IndexOutOfRange(f"user index {user_index} not in 0..{model.m - 1}")
    return model.U1[user_index] @ model.V.T


def rating_to_circles(value: float) -> int:
    """Display transform: clamp to [1, 5], then round half up."""
    clamped = min(max(value, 1.0), float(RATING_SCALE))
    return int(math.floor(clamped + 0.5))


def evaluate_rmse(model: EfmModel, holdout) -> float:
    """Root-mean-square error of predict_rating over (user, item, rating)."""
    total, count = 0.0, 0
    for user_index, item_index, rating in holdout:
        residual = predict_rating(model, user_index, item_index) - rating
        total += residual * residual
        count += 1
    if count == 0:
        raise EmptyHoldout("holdout set is empty")
    return math.sqrt(total / count)


CHECKPOINT_VERSION = 1


def save_checkpoint(model: EfmModel, path: str | Path) -> None:
    """Write a versioned JSON checkpoint; byte-identical for identical models."""
    obj = {
        "version": CHECKPOINT_VERSION,
        "dims": {
            "m": model.m,
            "n": model.n,
            "p": N_FEATURES,
            "r": model.hyperparams.r,
            "r_h": model.hyperparams.r_h,
        },
        "hyperparams": model.hyperparams.to_json(),
        "U1": [float(v) for v in model.U1.ravel()],
        "U2": [float(v) for v in model.U2.ravel()],
        "V": [float(v) for v in model.V.ravel()],
        "H1": [float(v) for v in model.H1.ravel()],
        "H2": [float(v) for v in model.H2.ravel()],
        "training_log": [float(v) for v in model.training_log],
        "user_ids": list(model.user_ids.ids),
        "item_ids": list(model.item_ids.ids),
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_checkpoint(path: str | Path) -> EfmModel:
    """Read and validate a checkpoint; raises CheckpointVersionError when the
    version, dimensions or nonnegativity are off."""
    try:
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CheckpointVersionError(f"unreadable checkpoint: {e}") from None
    if not isinstance(obj, dict) or obj.get("version") != CHECKPOINT_VERSION:
        raise CheckpointVersionError(
            f"unsupported checkpoint version {obj.get('version') if isinstance(obj, dict) else None!r}"
        )
    try:
        dims = obj["dims"]
        m, n, p, r, r_h = (dims[k] for k in ("m", "n", "p", "r", "r_h"))
        if p != N_FEATURES:
            raise CheckpointVersionError(f"checkpoint has p={p}, expected {N_FEATURES}")
        h = Hyperparams(**obj["hyperparams"])
        if (h.r, h.r_h) != (r, r_h):
            raise CheckpointVersionError("dims disagree with hyperparams")
        shapes = {"U1": (m, r), "U2": (n, r), "V": (p, r), "H1": (m, r_h), "H2": (n, r_h)}
        factors = {}
        for name, shape in shapes.items():
            flat = np.asarray(obj[name], dtype=float)
            if flat.size != shape[0] * shape[1]:
                raise CheckpointVersionError(f"{name} has {flat.size} values, expected {shape}")
            if flat.size and flat.min() < 0:
                raise CheckpointVersionError(f"{name} contains negative entries")
            factors[name] = flat.reshape(shape)
        user_ids = IndexTable(obj["user_ids"])
        item_ids = IndexTable(obj["item_ids"])
        if len(user_ids) != m or len(item_ids) != n:
            raise CheckpointVersionError("id tables disagree with dims")
        return EfmModel(
            **factors,
            hyperparams=h,
            user_ids=user_ids,
            item_ids=item_ids,
            training_log=[float(v) for v in obj["training_log"]],
        )
    except CheckpointVersionError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointVersionError(f"malformed checkpoint: {e}") from None


def holdout_split(A: RatingMatrix, fraction: float, seed: int):
    """Deterministically split observed ratings into train/holdout parts.

    Returns (train_matrix, holdout) where holdout is a list of
    (user_index, item_index, rating). Every user and item keeps at least
    one training entry when possible (entries are only held out from
    users/items with two or more observations).
    """
    rng = np.random.default_rng(seed)
    keys = sorted(A.entries)
    rng.shuffle(keys)
    user_counts: dict[int, int] = {}
    item_counts: dict[int, int] = {}
    for u, i in keys:
        user_counts[u] = user_counts.get(u, 0) + 1
        item_counts[i] = item_counts.get(i, 0) + 1
    target = int(round(fraction * len(keys)))
    holdout = []
    train_entries = dict(A.entries)
    for u, i in keys:
        if len(holdout) >= target:
            break
        if user_counts[u] > 1 and item_counts[i] > 1:
            holdout.append((u, i, A.entries[(u, i)]))
            del train_entries[(u, i)]
            user_counts[u] -= 1
            item_counts[i] -= 1
    train = RatingMatrix(user_ids=A.user_ids, item_ids=A.item_ids, entries=train_entries)
    return train, holdout
