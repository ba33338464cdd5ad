"""Seeded mixed-noise synthesis for hyperspectral cubes.

Cubes are arrays of shape ``(rows, cols, bands)``. Band ranges are 1-based
and inclusive (``band_lo=161, band_hi=190`` touches 30 bands). Every
generator returns a new array and leaves its input untouched.

Randomness comes from numpy's PCG64 bit generator. A component at index
``k`` of a :class:`NoiseSpec` draws from ``SeedSequence(seed,
spawn_key=(k,))``, so composed specs replay bit for bit.
"""

import json
from dataclasses import dataclass, field

import numpy as np

RNG_ALGORITHM = "numpy.random.PCG64(SeedSequence)"

__all__ = [
    "RNG_ALGORITHM",
    "NoiseSpec",
    "add_gaussian",
    "add_gaussian_snr",
    "add_stripes",
    "add_salt_pepper",
    "apply_spec",
    "protocol_one",
    "protocol_two",
    "load_noise_spec",
    "save_noise_spec",
]


def _rng(seed):
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def _cube(cube):
    cube = np.array(cube, dtype=np.float64, copy=True)
    if cube.ndim != 3:
        raise ValueError(f"cube must be 3-D (rows, cols, bands), got shape {cube.shape}")
    return cube


def add_gaussian(cube, variance, seed=0):
    """Add i.i.d. zero-mean Gaussian noise of the given variance to every pixel."""
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    out = _cube(cube)
    if variance == 0:
        return out
    return out + _rng(seed).normal(0.0, np.sqrt(variance), size=out.shape)


def add_gaussian_snr(cube, snr_db_min, snr_db_max, seed=0):
    """Add Gaussian noise with a random per-band SNR.

    For each band a target SNR is drawn uniformly from
    ``[snr_db_min, snr_db_max]`` dB and noise of variance
    ``mean(band**2) / 10**(snr/10)`` is added. Bands with zero power are
    left alone.

    Returns
    -------
    noisy : ndarray
    report : dict
      ``target_snr_db`` (per band, NaN where skipped), ``skipped_bands``
      (0-based) and ``mean_target_snr_db`` over noised bands.
    """
    if snr_db_min > snr_db_max:
        raise ValueError("snr_db_min must not exceed snr_db_max")
    out = _cube(cube)
    rng = _rng(seed)
    n = out.shape[2]
    targets = np.full(n, np.nan)
    skipped = []
    for b in range(n):
        snr = rng.uniform(snr_db_min, snr_db_max)
        noise = rng.standard_normal(out.shape[:2])
        power = np.mean(out[:, :, b] ** 2)
        if power == 0:
            skipped.append(b)
            continue
        targets[b] = snr
        out[:, :, b] += np.sqrt(power / 10 ** (snr / 10)) * noise
    used = targets[~np.isnan(targets)]
    report = {
        "target_snr_db": targets.tolist(),
        "skipped_bands": skipped,
        "mean_target_snr_db": float(used.mean()) if used.size else None,
    }
    return out, report


def _band_slice(n_bands, band_lo, band_hi):
    if not 1 <= band_lo <= band_hi <= n_bands:
        raise ValueError(f"band range {band_lo}-{band_hi} outside 1..{n_bands}")
    return range(band_lo - 1, band_hi)


def add_stripes(cube, band_lo, band_hi, cols_min, cols_max,
                offset_lo, offset_hi, seed=0):
    """Add constant column offsets (stripes) to a range of bands.

    Each band in ``band_lo..band_hi`` gets ``k ~ U{cols_min..cols_max}``
    distinct columns, and each chosen column is shifted by one draw from
    ``U(offset_lo, offset_hi)``. Dead lines are stripes whose offset
    cancels the column, which this generator does not model directly.
    """
    out = _cube(cube)
    c = out.shape[1]
    if not 0 <= cols_min <= cols_max:
        raise ValueError("need 0 <= cols_min <= cols_max")
    if cols_max > c:
        raise ValueError(f"cols_max={cols_max} exceeds image width {c}")
    rng = _rng(seed)
    for b in _band_slice(out.shape[2], band_lo, band_hi):
        k = int(rng.integers(cols_min, cols_max, endpoint=True))
        cols = rng.choice(c, size=k, replace=False)
        offsets = rng.uniform(offset_lo, offset_hi, size=k)
        out[:, cols, b] += offsets
    return out


def add_salt_pepper(cube, fraction, intensity_lo, intensity_hi, seed=0):
    """Impulse noise on exactly ``round(fraction * rows * cols)`` pixels per band.

    Each band draws an amplitude ``a ~ U[intensity_lo, intensity_hi]``; a
    corrupted pixel becomes ``band.max() + a`` or ``band.min() - a`` with
    equal probability.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    out = _cube(cube)
    r, c, n = out.shape
    count = int(round(fraction * r * c))
    rng = _rng(seed)
    for b in range(n):
        amp = rng.uniform(intensity_lo, intensity_hi)
        idx = rng.choice(r * c, size=count, replace=False)
        salt = rng.random(count) < 0.5
        band = out[:, :, b]
        hi, lo = band.max() + amp, band.min() - amp
        flat = band.reshape(-1).copy()
        flat[idx] = np.where(salt, hi, lo)
        out[:, :, b] = flat.reshape(r, c)
    return out


_COMPONENT_KEYS = {
    "gaussian": ("variance",),
    "gaussian_snr": ("snr_db_min", "snr_db_max"),
    "stripes": ("band_lo", "band_hi", "cols_min", "cols_max", "offset_lo", "offset_hi"),
    "salt_pepper": ("fraction", "intensity_lo", "intensity_hi"),
}

_GENERATORS = {
    "gaussian": add_gaussian,
    "gaussian_snr": lambda cube, seed, **kw: add_gaussian_snr(cube, seed=seed, **kw)[0],
    "stripes": add_stripes,
    "salt_pepper": add_salt_pepper,
}


@dataclass
class NoiseSpec:
    """Ordered list of noise components plus a master seed.

    Components are dicts with a ``type`` key (one of ``gaussian``,
    ``gaussian_snr``, ``stripes``, ``salt_pepper``) and that generator's
    keyword arguments.
    """

    seed: int = 0
    components: list = field(default_factory=list)

    def __post_init__(self):
        for comp in self.components:
            kind = comp.get("type")
            if kind not in _COMPONENT_KEYS:
                raise ValueError(f"unknown noise component {kind!r}")
            missing = set(_COMPONENT_KEYS[kind]) - set(comp)
            extra = set(comp) - set(_COMPONENT_KEYS[kind]) - {"type"}
            if missing or extra:
                raise ValueError(f"{kind}: missing {sorted(missing)}, unexpected {sorted(extra)}")
            if kind == "gaussian" and comp["variance"] < 0:
                raise ValueError("variance must be nonnegative")
            if kind == "salt_pepper" and not 0 <= comp["fraction"] <= 1:
                raise ValueError("fraction must lie in [0, 1]")
            if kind == "stripes" and comp["cols_min"] > comp["cols_max"]:
                raise ValueError("cols_min must not exceed cols_max")

    def to_dict(self):
        return {"seed": int(self.seed), "rng": RNG_ALGORITHM,
                "components": [dict(c) for c in self.components]}

    @classmethod
    def from_dict(cls, data):
        return cls(seed=int(data.get("seed", 0)),
                   components=[dict(c) for c in data.get("components", [])])


def apply_spec(cube, spec):
    """Apply the spec's components in order with derived sub-seeds."""
    out = _cube(cube)
    for k, comp in enumerate(spec.components):
        kwargs = {key: comp[key] for key in _COMPONENT_KEYS[comp["type"]]}
        sub = np.random.SeedSequence(int(spec.seed), spawn_key=(k,))
        out = _GENERATORS[comp["type"]](out, seed=sub, **kwargs)
    return out


def protocol_one(seed=0, variance=0.14, bands=(161, 190), cols=(20, 40), offset=0.25):
    """Fixed-variance Gaussian noise plus stripes on a band range."""
    return NoiseSpec(seed=seed, components=[
        {"type": "gaussian", "variance": variance},
        {"type": "stripes", "band_lo": bands[0], "band_hi": bands[1],
         "cols_min": cols[0], "cols_max": cols[1],
         "offset_lo": -offset, "offset_hi": offset},
    ])


def protocol_two(seed=0, snr_db=(45.0, 55.0), fraction=0.2, intensity=(0.0196, 0.0784)):
    """Random per-band SNR Gaussian noise plus salt-and-pepper impulses."""
    return NoiseSpec(seed=seed, components=[
        {"type": "gaussian_snr", "snr_db_min": snr_db[0], "snr_db_max": snr_db[1]},
        {"type": "salt_pepper", "fraction": fraction,
         "intensity_lo": intensity[0], "intensity_hi": intensity[1]},
    ])


def save_noise_spec(spec, path):
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


def load_noise_spec(path):
    with open(path) as fh:
        return NoiseSpec.from_dict(json.load(fh))
