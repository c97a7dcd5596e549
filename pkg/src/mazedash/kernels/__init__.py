"""Hot loops over flat uint8 cell arrays (0 free, 1 visited, 2 obstacle).

Positions are flat indices ``row * cols + col``; directions are 0..3 in the
order up, right, down, left.
"""

from .slide import FREE, OBSTACLE, VISITED, apply_slide, count_moves, slide_length, undo_slide

__all__ = [
    "FREE",
    "VISITED",
    "OBSTACLE",
    "slide_length",
    "apply_slide",
    "undo_slide",
    "count_moves",
]
