"""
On-disk cache of modal forms keyed by system hash
"""
from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from ....utility.constants_manager import ConstantsManager
from ...system_model.models.system_models import SystemMatrices
from ..models.modal_models import ModalForm
from .modal_form import build_modal_form

logger = logging.getLogger(__name__)

_ARRAY_FIELDS = ("Phi", "Omega", "Psi", "Psi_inv", "shuffle", "D", "PhiTG", "U", "Z")


def system_key(system: SystemMatrices) -> str:
    """sha256 over the bytes of M, K, G and alpha."""
    h = hashlib.sha256()
    for arr in (system.M, system.K, system.G):
        h.update(str(arr.shape).encode("utf-8"))
        h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
    h.update(np.float64(system.alpha).tobytes())
    return h.hexdigest()


class ModalCache:
    """On-disk store of offline-stage results, one ``.npz`` per system."""

    def __init__(self, cache_dir: Optional[Path] = None):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else ConstantsManager().get_cache_dir()

    def path_for(self, system: SystemMatrices) -> Path:
        return self.cache_dir / f"modal_{system_key(system)[:32]}.npz"

    def load(self, system: SystemMatrices) -> Optional[ModalForm]:
        path = self.path_for(system)
        if not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as data:
                payload = {name: data[name] for name in _ARRAY_FIELDS}
                alpha = float(data["alpha"])
        except (OSError, KeyError, ValueError) as exc:
            logger.warning(f"Ignoring unreadable modal cache {path}: {exc}")
            return None
        return ModalForm(alpha=alpha, **payload)

    def store(self, system: SystemMatrices, mf: ModalForm) -> Path:
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(system)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, alpha=np.float64(mf.alpha), **{name: getattr(mf, name) for name in _ARRAY_FIELDS})
        tmp.replace(path)
        return path

    def get_or_build(self, system: SystemMatrices) -> ModalForm:
        mf = self.load(system)
        if mf is not None:
            logger.info(f"Modal cache hit: {self.path_for(system)}")
            return mf
        logger.info(f"Modal cache miss for n={system.n}; running offline stage")
        mf = build_modal_form(system)
        path = self.store(system, mf)
        logger.info(f"Modal form cached at {path}")
        return mf
