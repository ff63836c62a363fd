"""Uncertainty-bearing regressors over encoded configurations.

Four kinds: random forest (RF), extra trees (ET), gradient-boosted
regression trees with quantile models (GBRT), and a Gaussian process (GP).
Targets are fitted on log(seconds) so runtimes spanning orders of magnitude
stay well conditioned; predicted means are exponentiated back to seconds
while sigma is reported as the spread of the fitted log-runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.tree import DecisionTreeRegressor, ExtraTreeRegressor

RF = "RF"
ET = "ET"
GBRT = "GBRT"
GP = "GP"
KINDS = (RF, ET, GBRT, GP)

N_TREES = 100
MIN_LEAF_RF = 2
GBRT_QUANTILES = (0.16, 0.50, 0.84)
GBRT_STAGES = 25
GBRT_LEARNING_RATE = 0.2
GBRT_MAX_DEPTH = 3
GP_MAX_POINTS = 1000
GP_LENGTH_SCALE_GRID = np.logspace(-1.3, 0.6, 16)
GP_JITTER_START = 1e-8
GP_JITTER_MAX = 1e-2
LOG_FLOOR = 1e-12


class SurrogateError(Exception):
    """Base class for surrogate errors."""


class EmptyTrainingSet(SurrogateError):
    """fit was called without any training rows."""


class SingularKernel(SurrogateError):
    """GP kernel matrix stayed non-invertible through the whole jitter ladder."""


class FeatureLengthMismatch(SurrogateError):
    """predict received vectors of the wrong length."""


class UnknownLearner(SurrogateError):
    """fit was asked for a kind outside RF/ET/GBRT/GP."""


class TrainingSetTooLarge(SurrogateError):
    """GP training set exceeds the cubic-solve cap."""


@dataclass(frozen=True)
class Prediction:
    """mean is in seconds; sigma is the log-runtime spread, >= 0."""

    mean: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.sigma)):
            raise SurrogateError("prediction fields must be finite")
        if self.sigma < 0:
            raise SurrogateError("prediction sigma must be >= 0")


class TrainingSet:
    """Encoded feature rows plus objective seconds."""

    def __init__(self, X, y) -> None:
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 1:
            raise SurrogateError("X must be 2-D and y 1-D")
        if X.shape[0] == 0:
            raise EmptyTrainingSet("training set has no rows")
        if X.shape[0] != y.shape[0]:
            raise SurrogateError("X and y row counts differ")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise SurrogateError("training data must be finite")
        self.X = X
        self.y = y

    def __len__(self) -> int:
        return self.X.shape[0]


class SurrogateModel:
    """Fitted regressor returning (mean seconds, log-sigma) per encoded vector."""

    kind: str

    def __init__(self, n_features: int, z_min: float, z_max: float) -> None:
        self.n_features = n_features
        self._z_min = z_min
        self._z_max = z_max

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise FeatureLengthMismatch(
                f"expected vectors of length {self.n_features}, got shape {X.shape}"
            )
        return X

    def predict_log(self, X) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def predict(self, X) -> list[Prediction]:
        mu, sigma = self.predict_log(self._check(X))
        return [Prediction(mean=float(np.exp(m)), sigma=float(s)) for m, s in zip(mu, sigma)]


def fit(kind: str, data: TrainingSet, rng: np.random.Generator | None = None,
        gp_cap: int = GP_MAX_POINTS) -> SurrogateModel:
    """Fit a surrogate of the given kind; deterministic for fixed (kind, data, seed)."""
    if kind not in KINDS:
        raise UnknownLearner(f"unknown surrogate kind {kind!r}")
    if not isinstance(data, TrainingSet):
        data = TrainingSet(*data)
    seed = 0 if rng is None else int(rng.integers(0, 2**31 - 1))
    z = np.log(np.maximum(data.y, LOG_FLOOR))
    if kind == RF:
        return _TreeEnsemble(data.X, z, seed, bootstrap=True)
    if kind == ET:
        return _TreeEnsemble(data.X, z, seed, bootstrap=False)
    if kind == GBRT:
        return _QuantileBoostEnsemble(data.X, z, seed)
    if len(data) > gp_cap:
        raise TrainingSetTooLarge(f"GP cap is {gp_cap} points, got {len(data)}")
    return _GaussianProcess(data.X, z)


def predict(model: SurrogateModel, X) -> list[Prediction]:
    """One Prediction per input vector."""
    return model.predict(X)


class _TreeEnsemble(SurrogateModel):
    """Bagged decision trees (RF) or extra trees (ET); sigma = per-tree std.

    Thin bagging over sklearn tree estimators rather than the ensemble
    wrappers: per-tree predictions are needed for sigma anyway, and the thin
    loop roughly halves fit overhead, which dominates the tuning loop.
    """

    def __init__(self, X: np.ndarray, z: np.ndarray, seed: int, bootstrap: bool) -> None:
        super().__init__(X.shape[1], float(z.min()), float(z.max()))
        self.kind = RF if bootstrap else ET
        X32 = np.ascontiguousarray(X, dtype=np.float32)
        n, d = X32.shape
        max_features = math.ceil(math.sqrt(d))
        rng = np.random.default_rng(seed)
        tree_seeds = rng.integers(0, 2**31 - 1, size=N_TREES)
        self._trees = []
        for i in range(N_TREES):
            if bootstrap:
                rows = rng.integers(0, n, size=n)
                tree = DecisionTreeRegressor(
                    max_features=max_features,
                    min_samples_leaf=MIN_LEAF_RF,
                    random_state=int(tree_seeds[i]),
                )
                tree.fit(X32[rows], z[rows], check_input=False)
            else:
                tree = ExtraTreeRegressor(
                    max_features=max_features,
                    random_state=int(tree_seeds[i]),
                )
                tree.fit(X32, z, check_input=False)
            self._trees.append(tree)

    def predict_log(self, X) -> tuple[np.ndarray, np.ndarray]:
        X32 = np.ascontiguousarray(self._check(X), dtype=np.float32)
        preds = np.empty((N_TREES, X32.shape[0]))
        for i, tree in enumerate(self._trees):
            preds[i] = tree.predict(X32, check_input=False)
        return preds.mean(axis=0), preds.std(axis=0)


class _PinballBooster:
    """Gradient boosting under pinball loss at one quantile."""

    def __init__(self, alpha: float, X: np.ndarray, z: np.ndarray, seed: int) -> None:
        self.alpha = alpha
        self.base = float(np.quantile(z, alpha))
        self.trees: list[tuple[DecisionTreeRegressor, np.ndarray]] = []
        current = np.full(z.shape, self.base)
        seeds = np.random.default_rng(seed).integers(0, 2**31 - 1, size=GBRT_STAGES)
        for m in range(GBRT_STAGES):
            # negative pinball gradient
            grad = np.where(z > current, alpha, alpha - 1.0)
            tree = DecisionTreeRegressor(
                max_depth=GBRT_MAX_DEPTH,
                min_samples_leaf=MIN_LEAF_RF,
                random_state=int(seeds[m]),
            )
            tree.fit(X, grad, check_input=False)
            leaves = tree.apply(X)
            gamma = np.zeros(tree.tree_.node_count)
            residual = z - current
            for leaf in np.unique(leaves):
                gamma[leaf] = np.quantile(residual[leaves == leaf], alpha)
            current = current + GBRT_LEARNING_RATE * gamma[leaves]
            self.trees.append((tree, gamma))

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.base)
        for tree, gamma in self.trees:
            out += GBRT_LEARNING_RATE * gamma[tree.apply(X)]
        return out


class _QuantileBoostEnsemble(SurrogateModel):
    """Three pinball-loss boosters; mean = median model, sigma = half the spread."""

    kind = GBRT

    def __init__(self, X: np.ndarray, z: np.ndarray, seed: int) -> None:
        super().__init__(X.shape[1], float(z.min()), float(z.max()))
        X32 = np.ascontiguousarray(X, dtype=np.float32)
        seeds = np.random.default_rng(seed).integers(0, 2**31 - 1, size=3)
        self._boosters = {
            q: _PinballBooster(q, X32, z, int(s)) for q, s in zip(GBRT_QUANTILES, seeds)
        }

    def predict_log(self, X) -> tuple[np.ndarray, np.ndarray]:
        X32 = np.ascontiguousarray(self._check(X), dtype=np.float32)
        low = self._boosters[GBRT_QUANTILES[0]].predict(X32)
        mid = self._boosters[GBRT_QUANTILES[1]].predict(X32)
        high = self._boosters[GBRT_QUANTILES[2]].predict(X32)
        # boosting steps can overshoot the observed target range slightly;
        # the reported mean stays inside it
        mu = np.clip(mid, self._z_min, self._z_max)
        sigma = np.maximum((high - low) / 2.0, 0.0)
        return mu, sigma


class _GaussianProcess(SurrogateModel):
    """Squared-exponential GP with one shared length scale.

    The length scale is picked by log marginal likelihood over a fixed
    16-point log grid with the signal variance concentrated out in closed
    form; the jitter ladder escalates tenfold from 1e-8 to 1e-2 before
    giving up with SingularKernel.
    """

    kind = GP

    def __init__(self, X: np.ndarray, z: np.ndarray) -> None:
        super().__init__(X.shape[1], float(z.min()), float(z.max()))
        self._X = np.array(X, dtype=np.float64)
        self._z_mean = float(z.mean())
        zc = z - self._z_mean
        n = len(zc)
        d2 = _sq_dists(self._X, self._X)
        chosen = None
        jitter = GP_JITTER_START
        while jitter <= GP_JITTER_MAX * 1.0000001:
            for ell in GP_LENGTH_SCALE_GRID:
                corr = np.exp(-d2 / (2.0 * ell * ell))
                try:
                    chol = np.linalg.cholesky(corr + jitter * np.eye(n))
                except np.linalg.LinAlgError:
                    continue
                alpha = _chol_solve(chol, zc)
                signal_var = max(float(zc @ alpha) / n, 1e-12)
                lml = -0.5 * n * math.log(signal_var) - float(np.log(np.diag(chol)).sum())
                if chosen is None or lml > chosen[0]:
                    chosen = (lml, ell, jitter, chol, alpha, signal_var)
            if chosen is not None:
                break
            jitter *= 10.0
        if chosen is None:
            raise SingularKernel("kernel matrix not invertible at any jitter level")
        _, self.length_scale, self.jitter, self._chol, self._alpha, self.signal_variance = chosen

    @property
    def prior_sigma(self) -> float:
        """Log-space standard deviation far away from all training points."""
        return math.sqrt(self.signal_variance * (1.0 + self.jitter))

    def predict_log(self, X) -> tuple[np.ndarray, np.ndarray]:
        Xq = self._check(X)
        corr = np.exp(-_sq_dists(self._X, Xq) / (2.0 * self.length_scale**2))
        mu = self._z_mean + corr.T @ self._alpha
        solved = _chol_solve(self._chol, corr)
        var = self.signal_variance * (1.0 + self.jitter - np.einsum("ij,ij->j", corr, solved))
        return mu, np.sqrt(np.maximum(var, 0.0))


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    aa = (A * A).sum(axis=1)[:, None]
    bb = (B * B).sum(axis=1)[None, :]
    return np.maximum(aa + bb - 2.0 * (A @ B.T), 0.0)


def _chol_solve(chol: np.ndarray, b: np.ndarray) -> np.ndarray:
    y = np.linalg.solve(chol, b)
    return np.linalg.solve(chol.T, y)
