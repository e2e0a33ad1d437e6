"""Synthetic instances driven by per-class linear recurrences."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_int, substream
from .exceptions import DomainError, SynthError
from .windowing import InstanceWindow

MAX_RETRIES = 10
_OVERFLOW = 1e12


def _oscillator(omega, radius=1.0):
    # x_t = 2 r cos(w) x_{t-1} - r^2 x_{t-2}
    return [2.0 * radius * math.cos(omega), -radius * radius]


def default_recurrences():
    """Two classes, two features, undamped oscillators from class frequency bands.

    Every instance draws its own frequency from the band and its own
    amplitude and phase, so the raw waveforms of one class do not line up;
    only the order-2 recurrence family identifies the class.
    """
    return {
        0: [{"omega": [0.2, 0.4]}, {"omega": [0.8, 1.0]}],
        1: [{"omega": [0.5, 0.7]}, {"omega": [1.1, 1.3]}],
    }


def _check_entry(entry, k):
    if isinstance(entry, dict):
        lo, hi = map(float, entry["omega"])
        radius = float(entry.get("radius", 1.0))
        if not 0.0 < lo <= hi < math.pi or not radius > 0:
            raise DomainError(f"bad oscillator band {entry}")
        return {"omega": [lo, hi], "radius": radius}
    coeffs = [float(a) for a in entry]
    if not 1 <= len(coeffs) < k:
        raise DomainError(f"recurrence order {len(coeffs)} out of range")
    return coeffs


def _order(entry):
    return 2 if isinstance(entry, dict) else len(entry)


def _draw_coefficients(entry, rng):
    if isinstance(entry, dict):
        return _oscillator(rng.uniform(*entry["omega"]), entry["radius"])
    return entry


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for :func:`generate_synthetic`.

    ``recurrences[c][j]`` describes feature ``j`` of class ``c``: either a
    list of fixed coefficients ``a_1..a_p`` of
    ``x_t = a_1 x_{t-1} + ... + a_p x_{t-p}``, or an oscillator band
    ``{"omega": [lo, hi], "radius": r}`` from which every instance draws
    ``x_t = 2 r cos(w) x_{t-1} - r^2 x_{t-2}`` with ``w ~ U(lo, hi)``. With ``noise_relative`` the noise standard deviation is
    ``noise_sigma`` times the RMS of the clean series, otherwise absolute.
    """

    n_per_class: int = 100
    k: int = 720
    m: int = 2
    recurrences: dict = field(default_factory=default_recurrences)
    noise_sigma: float = 0.0
    noise_relative: bool = False
    seed: int = 12345

    def __post_init__(self):
        check_int(self.n_per_class, "n_per_class", min_value=1)
        check_int(self.k, "k", min_value=2)
        check_int(self.m, "m", min_value=1)
        if self.noise_sigma < 0 or not math.isfinite(self.noise_sigma):
            raise DomainError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        recs = {int(c): [_check_entry(e, self.k) for e in feats]
                for c, feats in self.recurrences.items()}
        if sorted(recs) != [0, 1]:
            raise DomainError("recurrences must be given for classes 0 and 1")
        for c, feats in recs.items():
            if len(feats) != self.m:
                raise DomainError(f"class {c} has {len(feats)} recurrences, expected m={self.m}")
        object.__setattr__(self, "recurrences", recs)

    @property
    def max_order(self):
        return max(_order(e) for feats in self.recurrences.values() for e in feats)

    def check_embedding(self, l):
        """Laws are only representable when every recurrence order is below ``l``."""
        if self.max_order >= l:
            raise DomainError(f"recurrence order {self.max_order} must be < l={l}")

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if "recurrences" in data:
            data["recurrences"] = {int(c): v for c, v in data["recurrences"].items()}
        return cls(**data)

    def to_json(self):
        data = asdict(self)
        data["recurrences"] = {str(c): v for c, v in self.recurrences.items()}
        return json.dumps(data, indent=2)


def _run_recurrence(coeffs, init, k):
    p = len(coeffs)
    x = np.empty(k)
    x[:p] = init[:p]
    a = np.asarray(coeffs)[::-1]  # a_p .. a_1 against x[t-p:t]
    for t in range(p, k):
        x[t] = float(np.dot(a, x[t - p : t]))
        if not abs(x[t]) < _OVERFLOW:
            return None
    return x


def generate_synthetic(spec):
    """Balanced instances whose features follow the class recurrences.

    Initial conditions are standard normal; a diverging series is
    regenerated from initial conditions damped by 10x per retry.
    """
    rng = substream(spec.seed, "synth")
    out = []
    for i in range(spec.n_per_class):
        for c in (0, 1):
            X = np.empty((spec.k, spec.m))
            for j, entry in enumerate(spec.recurrences[c]):
                coeffs = _draw_coefficients(entry, rng)
                x = None
                for attempt in range(MAX_RETRIES + 1):
                    init = rng.standard_normal(len(coeffs)) * 10.0 ** (-attempt)
                    x = _run_recurrence(coeffs, init, spec.k)
                    if x is not None:
                        break
                if x is None:
                    raise SynthError(
                        f"recurrence {coeffs} diverged after {MAX_RETRIES} damped retries"
                    )
                if spec.noise_sigma > 0:
                    sigma = spec.noise_sigma
                    if spec.noise_relative:
                        sigma *= float(np.sqrt(np.mean(x * x)))
                    x = x + sigma * rng.standard_normal(spec.k)
                X[:, j] = x
            out.append(InstanceWindow(2 * i + c, X, c))
    return out


def shuffle_labels(instances, seed):
    """Copy of ``instances`` with labels permuted (class counts preserved)."""
    rng = substream(seed, "shuffle")
    labels = np.array([inst.label for inst in instances])[rng.permutation(len(instances))]
    return [InstanceWindow(inst.instance_id, inst.X, int(lab), inst.anchor_ts)
            for inst, lab in zip(instances, labels)]
