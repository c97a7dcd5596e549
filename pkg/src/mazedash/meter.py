"""Logical memory accounting for solver data structures."""


class MemoryMeter:
    """Counts bytes that solvers declare for their arrays, nodes and clauses.

    Independent of the allocator and of interpreter overhead, so the numbers
    are deterministic and comparable across runs and backends.
    """

    def __init__(self):
        self.current_bytes = 0
        self.peak_bytes = 0

    def alloc(self, nbytes: int) -> None:
        self.current_bytes += int(nbytes)
        if self.current_bytes > self.peak_bytes:
            self.peak_bytes = self.current_bytes

    def free(self, nbytes: int) -> None:
        nbytes = int(nbytes)
        if nbytes > self.current_bytes:
            raise ValueError("freeing more bytes than are tracked")
        self.current_bytes -= nbytes

    def track(self, *arrays) -> int:
        total = sum(int(a.nbytes) for a in arrays)
        self.alloc(total)
        return total

    def __repr__(self):
        return f"MemoryMeter(current={self.current_bytes}, peak={self.peak_bytes})"
