"""Exception types shared across the package.

Anything user-facing raises a subclass of FiregraphError so the CLI can map
failures to structured JSON on stderr with a stable ``code`` string.
"""

from __future__ import annotations


class FiregraphError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "error"

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


class EnumerationCapExceeded(FiregraphError):
    """A ball/BFS enumeration hit the member cap before finishing."""

    code = "enumeration-cap-exceeded"


class InvalidFamilyError(FiregraphError):
    code = "invalid-family"


class ProtectionOverlapError(FiregraphError):
    """Protection set touches burning or already-protected vertices."""

    code = "protection-overlap"

    def __init__(self, message: str, offending=()):
        super().__init__(message)
        self.offending = tuple(offending)

    def payload(self) -> dict:
        d = super().payload()
        d["offending"] = [str(k) for k in self.offending]
        return d


class BudgetExceededError(FiregraphError):
    """|W_n| above the declared budget f_n."""

    code = "budget-exceeded"


class NonMonotoneBudgetError(FiregraphError):
    code = "non-monotone-budget"


class PartitionInfeasibleError(FiregraphError):
    """Turn-rescaling cannot split a protection set under the target budget."""

    code = "partition-infeasible"


class HypothesisViolationError(FiregraphError):
    """Growth-hypothesis check failed; carries the first offending index."""

    code = "hypothesis-violation"

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index

    def payload(self) -> dict:
        d = super().payload()
        d["index"] = self.index
        return d


class ReplayMismatchError(FiregraphError):
    """A recorded trace disagrees with its deterministic re-run."""

    code = "replay-mismatch"


class ScanCapExceededError(FiregraphError):
    """A bounded scan (radius search, horizon search) ran out of room."""

    code = "scan-cap-exceeded"


class CertificationRefused(FiregraphError):
    """Premises for a certificate could not be established."""

    code = "certification-refused"


class QiVerificationError(FiregraphError):
    """Sampled coarse-map inequalities failed; carries worst offender."""

    code = "qi-verification-failed"


class TransferInvariantError(FiregraphError):
    """A per-turn invariant of strategy transfer failed at runtime."""

    code = "transfer-invariant-failed"
