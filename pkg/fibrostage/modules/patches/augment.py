"""Augmentation of square patches by axis flips and right-angle rotations."""

from collections.abc import Callable

import numpy as np

from fibrostage.modules.patches.schemas import Patch

ArrayOp = Callable[[np.ndarray], np.ndarray]

# Operate on the trailing (y, x) axes so the same op serves data [C, y, x] and support [y, x]
TRANSFORMS: dict[str, ArrayOp] = {
    "flip_x": lambda a: np.flip(a, axis=-1),
    "flip_y": lambda a: np.flip(a, axis=-2),
    "rot90": lambda a: np.rot90(a, k=1, axes=(-2, -1)),
    "rot180": lambda a: np.rot90(a, k=2, axes=(-2, -1)),
    "rot270": lambda a: np.rot90(a, k=3, axes=(-2, -1)),
}
TRANSFORM_NAMES = tuple(TRANSFORMS)


def augment_patch(patch: Patch, name: str) -> Patch:
    """Copy of ``patch`` with transform ``name`` applied to every channel and its support."""
    op = TRANSFORMS[name]
    return patch.model_copy(
        update={
            "data": _frozen(op(patch.data)),
            "support": _frozen(op(patch.support)),
            "augmentation": name,
        }
    )


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True, order="C")
    out.setflags(write=False)
    return out


def balance_by_augmentation(minority: list[Patch], target: int) -> list[Patch]:
    """Augmented copies that bring ``minority`` up to ``target`` patches.

    Copies cycle through the originals first and through the transforms second, so the
    result is deterministic and every transform of one original is used before any repeats.
    """
    needed = target - len(minority)
    if needed <= 0 or not minority:
        return []
    n = len(minority)
    return [
        augment_patch(minority[j % n], TRANSFORM_NAMES[(j // n) % len(TRANSFORM_NAMES)])
        for j in range(needed)
    ]
