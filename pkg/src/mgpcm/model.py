"""Data model for the multidimensional generalized partial credit model.

An item j with K_j ordered categories scores responses y in {0, ..., K_j - 1}.
The category probabilities are

    P(y = k | theta) = exp(k * a_j'theta - b_jk) / sum_v exp(v * a_j'theta - b_jv)

with the first threshold b_j0 fixed at zero for identification, so only
K_j - 1 thresholds per item are estimated.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataValidationError


@dataclass(frozen=True)
class ResponseMatrix:
    """Integer-coded polytomous responses.

    Parameters
    ----------
    data : ndarray of shape (n_examinees, n_items)
        Category codes; entry (i, j) lies in {0, ..., categories[j] - 1}.
    categories : ndarray of shape (n_items,)
        Number of categories K_j per item, each at least 2.
    missing_mask : ndarray of bool, optional
        True marks a missing cell. Estimation requires complete data; the
        loader either rejects or listwise-deletes incomplete rows.
    """

    data: np.ndarray
    categories: np.ndarray
    missing_mask: np.ndarray | None = None

    def __post_init__(self):
        data = np.ascontiguousarray(np.asarray(self.data, dtype=np.int64))
        cats = np.ascontiguousarray(np.asarray(self.categories, dtype=np.int64))
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DataValidationError("response matrix must be a nonempty 2-D array")
        if cats.shape != (data.shape[1],):
            raise DataValidationError("categories must have one entry per item")
        if np.any(cats < 2):
            raise DataValidationError("every item needs at least 2 categories")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "categories", cats)
        mask = self.missing_mask
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != data.shape:
                raise DataValidationError("missing_mask shape must match data")
            object.__setattr__(self, "missing_mask", mask)
        observed = data if mask is None else np.where(mask, 0, data)
        if np.any(observed < 0) or np.any(observed >= cats[None, :]):
            bad = np.argwhere((data < 0) | (data >= cats[None, :]))
            raise DataValidationError(
                "category codes out of range", offenders=[tuple(map(int, rc)) for rc in bad[:20]]
            )

    @property
    def n_examinees(self):
        return self.data.shape[0]

    @property
    def n_items(self):
        return self.data.shape[1]

    @property
    def k_max(self):
        return int(self.categories.max())


def unobserved_categories(responses: ResponseMatrix) -> list[tuple[int, int]]:
    """(item, category) pairs with zero observations.

    A matrix is accepted for estimation only when this list is empty: a
    category no examinee reached has an unidentifiable threshold.
    """
    offenders = []
    y = responses.data
    for j in range(responses.n_items):
        counts = np.bincount(y[:, j], minlength=int(responses.categories[j]))
        for k in np.nonzero(counts[: responses.categories[j]] == 0)[0]:
            offenders.append((j, int(k)))
    return offenders


def check_estimable(responses: ResponseMatrix) -> None:
    """Raise DataValidationError unless every (item, category) is observed."""
    if responses.missing_mask is not None and responses.missing_mask.any():
        raise DataValidationError("estimation requires complete data (missing cells present)")
    offenders = unobserved_categories(responses)
    if offenders:
        raise DataValidationError(
            "unobserved (item, category) pairs: %s" % offenders[:20], offenders=offenders
        )


@dataclass(frozen=True)
class ItemParameters:
    """Discrimination matrix A (J x D) and threshold matrix B (J x (K_max - 1)).

    B[j, k - 1] stores b_jk for k = 1..K_j - 1; b_j0 is identically zero and
    never stored. Entries past an item's K_j - 1 are unused and kept at zero.
    """

    discrimination: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.discrimination, dtype=np.float64))
        b = np.ascontiguousarray(np.asarray(self.thresholds, dtype=np.float64))
        if a.ndim != 2:
            raise ValueError("discrimination must be J x D")
        if b.ndim != 2 or b.shape[0] != a.shape[0]:
            raise ValueError("thresholds must be J x (K_max - 1)")
        object.__setattr__(self, "discrimination", a)
        object.__setattr__(self, "thresholds", b)

    @property
    def n_items(self):
        return self.discrimination.shape[0]

    @property
    def dim(self):
        return self.discrimination.shape[1]


def full_thresholds(params: ItemParameters) -> np.ndarray:
    """J x K_max threshold table with the fixed b_j0 = 0 column prepended."""
    j = params.thresholds.shape[0]
    return np.hstack([np.zeros((j, 1)), params.thresholds])


@dataclass(frozen=True)
class LatentSpec:
    """Latent-trait distribution: dimension, covariance, and analysis mode.

    In exploratory mode sigma_theta stays the identity throughout estimation;
    in confirmatory mode it is re-estimated each cycle and rescaled to a
    correlation matrix.
    """

    dim: int
    sigma_theta: np.ndarray = None
    mode: str = "efa"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.mode not in ("efa", "cfa"):
            raise ValueError("mode must be 'efa' or 'cfa'")
        st = self.sigma_theta
        if st is None:
            st = np.eye(self.dim)
        st = np.ascontiguousarray(np.asarray(st, dtype=np.float64))
        if st.shape != (self.dim, self.dim):
            raise ValueError("sigma_theta must be dim x dim")
        if not np.allclose(st, st.T, atol=1e-10):
            raise ValueError("sigma_theta must be symmetric")
        if np.any(np.abs(np.diag(st) - 1.0) > 1e-10):
            raise ValueError("sigma_theta must have unit diagonal")
        if np.linalg.eigvalsh(st).min() <= 0:
            raise ValueError("sigma_theta must be positive-definite")
        object.__setattr__(self, "sigma_theta", st)


@dataclass(frozen=True)
class VariationalState:
    """Per-examinee posterior approximation and tightness parameters.

    mu[i] and sigma[i] are the Gaussian moments of examinee i's approximate
    posterior; xi[i, j, k] >= 0 is the quadratic-bound tightness parameter
    (only xi**2 enters any formula, so the nonnegative root is stored).
    """

    mu: np.ndarray
    sigma: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.ascontiguousarray(self.mu, dtype=np.float64))
        object.__setattr__(self, "sigma", np.ascontiguousarray(self.sigma, dtype=np.float64))
        object.__setattr__(self, "xi", np.ascontiguousarray(self.xi, dtype=np.float64))


def irf_probability(theta, a_j, b_j, k_j: int) -> np.ndarray:
    """Category probabilities for one item at ability theta.

    Parameters
    ----------
    theta : array of shape (D,)
    a_j : array of shape (D,)
    b_j : array of shape (>= k_j - 1,)
        Thresholds b_j1..b_j,K-1; the implicit b_j0 = 0 is prepended here.
    k_j : int
        Number of categories.

    Returns
    -------
    ndarray of shape (k_j,) summing to 1.

    Logits k * a_j'theta - b_jk are shifted by their maximum before
    exponentiation; k * a_j'theta grows linearly in k and would otherwise
    overflow for large loadings.
    """
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    a_j = np.asarray(a_j, dtype=np.float64).reshape(-1)
    b_j = np.asarray(b_j, dtype=np.float64).reshape(-1)
    if k_j < 2:
        raise ValueError("k_j must be >= 2")
    if b_j.size < k_j - 1:
        raise ValueError("b_j must hold at least k_j - 1 thresholds")
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(a_j)) and np.all(np.isfinite(b_j[: k_j - 1]))):
        raise ValueError("non-finite inputs to irf_probability")
    slope = float(a_j @ theta)
    logits = slope * np.arange(k_j) - np.concatenate([[0.0], b_j[: k_j - 1]])
    logits -= logits.max()
    ex = np.exp(logits)
    return ex / ex.sum()


def normal_logpdf(theta, sigma_theta) -> float:
    """Log density of MVN(0, sigma_theta) at theta."""
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    d = theta.size
    sign, logdet = np.linalg.slogdet(sigma_theta)
    if sign <= 0:
        raise np.linalg.LinAlgError("sigma_theta is singular or not positive-definite")
    quad = float(theta @ np.linalg.solve(sigma_theta, theta))
    return -0.5 * (d * np.log(2.0 * np.pi) + logdet + quad)


def log_joint(theta, responses_row, params: ItemParameters, latent: LatentSpec,
              categories=None) -> float:
    """Complete-data log density log P(y_i, theta_i) for one examinee.

    ``categories`` defaults to max-observed+1 inference being unavailable
    here, so it must be supplied when items have fewer categories than the
    threshold table width allows.
    """
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(theta)):
        raise ValueError("non-finite theta")
    y = np.asarray(responses_row, dtype=np.int64).reshape(-1)
    if categories is None:
        categories = np.full(y.size, params.thresholds.shape[1] + 1, dtype=np.int64)
    total = 0.0
    for j in range(y.size):
        p = irf_probability(theta, params.discrimination[j], params.thresholds[j], int(categories[j]))
        total += np.log(p[y[j]])
    return total + normal_logpdf(theta, latent.sigma_theta)
