"""Logarithmic block partitions and the avalanche principle.

Blocks g_j = X_{m_{j+1}-1} ... X_{m_j} are cut at m_{i+1} = m_i + r(m_i),
r(n) = floor((2/kappa) ln n). For a chain g_1, ..., g_l with gaps >= a and
pairwise deficiencies ln||g_{j+1} g_j|| - ln||g_{j+1}|| - ln||g_j|| >= -ln(b)/2
we evaluate

    pairs form:  ln||g_l...g_1|| + sum_{j=2}^{l-1} ln||g_j|| >= sum_{j=1}^{l-1} ln||g_{j+1} g_j|| - C l b / a
    norms form:  ln||g_l...g_1|| >= sum_{j=1}^{l} ln||g_j|| - (l/2) ln b - C l b / a

entirely in log scale. The constants c and C are not known numerically, so
the report gives slacks; an inequality counts as asserted only when both
hypotheses hold and a >= c b > c.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import LN2, RescaledProduct, rescaled_product, singular_exponents_exact
from .errors import DegenerateBlocks, StreamExhausted
from .linalg import as_matrix, exterior_power_batch, operator_norm

LOG_TOL = 1e-12
# Slacks are sums of l logarithms of O(1) numbers; each carries a few ulps.
SLACK_ULPS = 64 * 2.0 ** -52


def r_of(n, kappa):
    """Block length r(n) = floor((2/kappa) ln n)."""
    return int(math.floor((2.0 / kappa) * math.log(n)))


@dataclass(frozen=True)
class BlockPartition:
    """Cut points m_1 < m_2 < ... <= N; ``j_N`` and ``k_N`` are 0-based indices into them."""

    kappa: float
    start: int
    cut_points: tuple
    horizon: int
    j_N: int
    k_N: int

    @property
    def block_count(self):
        return self.k_N - self.j_N

    def block_ranges(self):
        """(first, last) step indices of g_{j_N}, ..., g_{k_N - 1}, inclusive."""
        m = self.cut_points
        return [(m[j], m[j + 1] - 1) for j in range(self.j_N, self.k_N)]

    def r(self, n):
        return r_of(n, self.kappa)


def build_partition(kappa, m1, N):
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if N <= m1:
        raise ValueError(f"horizon N={N} must exceed m1={m1}")
    if m1 < 1 or r_of(m1, kappa) < 1:
        raise DegenerateBlocks(f"r(m1) = floor((2/{kappa}) ln {m1}) = 0: blocks would be empty")
    cuts = [int(m1)]
    while True:
        nxt = cuts[-1] + r_of(cuts[-1], kappa)
        if nxt > N:
            break
        cuts.append(nxt)
    root = math.sqrt(N)
    j_N = next((j for j, m in enumerate(cuts) if m >= root), None)
    if j_N is None:
        raise DegenerateBlocks(f"no cut point reaches sqrt(N) = {root:.3f}")
    return BlockPartition(float(kappa), int(m1), tuple(cuts), int(N), j_N, len(cuts) - 1)


@dataclass
class Block:
    """A matrix g = 2^exponent * core with ln||g|| and ln||wedge^2 g|| tracked separately."""

    core: np.ndarray
    exponent: int
    log_norm: float
    log_wedge: float

    @property
    def log_gap(self):
        return 2.0 * self.log_norm - self.log_wedge

    @classmethod
    def from_matrix(cls, M):
        M = as_matrix(M)
        rp = rescaled_product(M[None])
        return cls._from_products(rp, rescaled_product(exterior_power_batch(M[None], 2)))

    @classmethod
    def from_factors(cls, mats):
        """Block for the ordered product mats[-1] ... mats[0]."""
        mats = np.asarray(mats, dtype=float)
        return cls._from_products(rescaled_product(mats),
                                  rescaled_product(exterior_power_batch(mats, 2)))

    @classmethod
    def _from_products(cls, rp, wedge):
        return cls(rp.core, rp.exponent, rp.log_norm(), wedge.log_norm())


def _as_blocks(blocks):
    return [b if isinstance(b, Block) else Block.from_matrix(b) for b in blocks]


@dataclass
class BlockSuite:
    partition: BlockPartition
    blocks: list
    prefix_logs: np.ndarray  # ln||wedge^k P||, k = 1..d, for P = X_{m_jN - 1} ... X_1
    suffix_logs: np.ndarray  # same for S = X_N ... X_{m_kN}
    prefix: RescaledProduct
    suffix: RescaledProduct

    def reconstruct(self):
        """Pi_N = S g_{k_N - 1} ... g_{j_N} P as a RescaledProduct."""
        mid = rescaled_product(np.array([b.core for b in self.blocks]), self.prefix)
        mid = RescaledProduct(mid.core, mid.exponent + sum(b.exponent for b in self.blocks))
        out = rescaled_product(self.suffix.core[None], mid)
        return RescaledProduct(out.core, out.exponent + self.suffix.exponent, self.partition.horizon)


def _exterior_logs(mats, d):
    products = [rescaled_product(exterior_power_batch(mats, k)) if len(mats)
                else RescaledProduct.identity(exterior_power_batch(np.eye(d), k).shape[0])
                for k in range(1, d + 1)]
    return np.array([p.log_norm() for p in products]), products[0]


def block_products(stream, partition):
    """Blocks g_{j_N}..g_{k_N - 1} of one realization plus the two edge segments."""
    N = partition.horizon
    mats = stream.take(N)
    if len(mats) < N:
        raise StreamExhausted(f"stream ended before step {N}")
    d = mats.shape[-1]
    m = partition.cut_points
    blocks = [Block.from_factors(mats[lo - 1:hi]) for lo, hi in partition.block_ranges()]
    pre_logs, pre = _exterior_logs(mats[:m[partition.j_N] - 1], d)
    suf_logs, suf = _exterior_logs(mats[m[partition.k_N] - 1:], d)
    return BlockSuite(partition, blocks, pre_logs, suf_logs, pre, suf)


def pair_deficiencies(blocks):
    """ln||g_{j+1} g_j|| - ln||g_{j+1}|| - ln||g_j|| for consecutive pairs (always <= 0)."""
    blocks = _as_blocks(blocks)
    out = np.empty(max(len(blocks) - 1, 0))
    for j in range(len(blocks) - 1):
        g1, g2 = blocks[j], blocks[j + 1]
        both = math.log(operator_norm(g2.core @ g1.core)) + (g1.exponent + g2.exponent) * LN2
        out[j] = both - g1.log_norm - g2.log_norm
    return out


def pair_log_norms(blocks):
    blocks = _as_blocks(blocks)
    return np.array([blocks[j].log_norm + blocks[j + 1].log_norm + dj
                     for j, dj in enumerate(pair_deficiencies(blocks))])


def chain_log_norm(blocks):
    """ln||g_l ... g_1||."""
    blocks = _as_blocks(blocks)
    rp = rescaled_product(np.array([b.core for b in blocks]))
    return rp.log_norm() + sum(b.exponent for b in blocks) * LN2


def measured_constants(blocks, b_floor=None):
    """a = min gap; b = exp(-2 * worst deficiency), raised to ``b_floor`` if given."""
    blocks = _as_blocks(blocks)
    a = math.exp(min(b.log_gap for b in blocks))
    defs = pair_deficiencies(blocks)
    b = math.exp(-2.0 * min(float(defs.min()), 0.0)) if len(defs) else 1.0
    if b_floor is not None:
        b = max(b, b_floor)
    return a, b


@dataclass
class HypothesisCheck:
    hyp_i_ok: bool
    hyp_ii_ok: bool
    precondition_ok: bool
    witness_i: int = None
    witness_ii: int = None
    log_gaps: np.ndarray = None
    deficiencies: np.ndarray = None

    @property
    def ok(self):
        return self.hyp_i_ok and self.hyp_ii_ok and self.precondition_ok


def check_hypotheses(blocks, a, b, c=10.0):
    """Evaluate gr(g_j) >= a for every block and the deficiency bound for every pair."""
    blocks = _as_blocks(blocks)
    gaps = np.array([blk.log_gap for blk in blocks])
    defs = pair_deficiencies(blocks)
    bad_i = np.nonzero(gaps < math.log(a) - LOG_TOL)[0]
    bad_ii = np.nonzero(defs < -0.5 * math.log(b) - LOG_TOL)[0]
    pre = a >= c * b and c * b > c
    return HypothesisCheck(len(bad_i) == 0, len(bad_ii) == 0, bool(pre),
                           int(bad_i[0]) if len(bad_i) else None,
                           int(bad_ii[0]) if len(bad_ii) else None, gaps, defs)


@dataclass
class AvalancheReport:
    l: int
    a: float
    b: float
    hyp_i_ok: bool
    hyp_ii_ok: bool
    precondition_ok: bool
    lhs: float  # ln||g_l ... g_1||
    lhs_pairs: float
    rhs_pairs: float
    rhs_norms: float
    slack_pairs: float
    slack_norms: float
    C_used: float
    c_used: float
    witnesses: dict = field(default_factory=dict)
    rounding: float = 0.0  # bound on the floating error of the computed slacks

    def holds(self):
        """Both slacks non-negative up to rounding."""
        return self.slack_pairs >= -self.rounding and self.slack_norms >= -self.rounding

    @property
    def asserted(self):
        return self.hyp_i_ok and self.hyp_ii_ok and self.precondition_ok


def avalanche_inequalities(blocks, a, b, C=2.0, c=10.0):
    blocks = _as_blocks(blocks)
    l = len(blocks)
    if l == 0:
        raise ValueError("need at least one block")
    hyp = check_hypotheses(blocks, a, b, c)
    norms = np.array([blk.log_norm for blk in blocks])
    defs = hyp.deficiencies
    error = C * l * b / a
    # the chain log-norm minus sum of block log-norms, with exponents cancelled exactly
    rp = rescaled_product(np.array([blk.core for blk in blocks]))
    excess = rp.log_norm() - float(np.sum([math.log(operator_norm(blk.core)) for blk in blocks]))
    lhs = float(norms.sum()) + excess
    inner = float(norms[1:-1].sum()) if l > 2 else 0.0
    pair_sum = float(np.sum(norms[:-1] + norms[1:] + defs)) if l > 1 else 0.0
    lhs_pairs = lhs + inner
    rhs_pairs = pair_sum - error
    rhs_norms = float(norms.sum()) - 0.5 * l * math.log(b) - error
    # slack_pairs = excess + sum over interior and pairs, arranged so that sums of
    # block log-norms cancel before rounding
    slack_pairs = excess - float(defs.sum()) + error if l > 1 else lhs_pairs - rhs_pairs
    slack_norms = excess + 0.5 * l * math.log(b) + error
    return AvalancheReport(l, a, b, hyp.hyp_i_ok, hyp.hyp_ii_ok, hyp.precondition_ok,
                           lhs, lhs_pairs, rhs_pairs, rhs_norms, slack_pairs, slack_norms, C, c,
                           {"hyp_i": hyp.witness_i, "hyp_ii": hyp.witness_ii},
                           SLACK_ULPS * (l + abs(excess) + float(np.abs(defs).sum())))


@dataclass
class PipelineResult:
    partition: BlockPartition
    report: AvalancheReport
    lower_bound: float  # None when the hypotheses fail
    exact: float
    notes: list = field(default_factory=list)

    @property
    def applicable(self):
        return self.lower_bound is not None


def _log_inverse_norm(ext_logs):
    """ln||A^{-1}|| = -ln s_d(A), from ln||wedge^k A||."""
    if len(ext_logs) == 1:
        return -float(ext_logs[0])
    return -float(ext_logs[-1] - ext_logs[-2])


def partition_pipeline(driver, kappa, m1, N, C=2.0, c=10.0, seed=0, trial=0, b_floor=None):
    """Partition, measure a and b on the blocks, evaluate the norms form, turn it into a bound on (1/N) ln||Pi_N||."""
    partition = build_partition(kappa, m1, N)
    suite = block_products(driver.stream(seed, trial), partition)
    if not suite.blocks:
        raise DegenerateBlocks("partition has no complete block between sqrt(N) and N")
    a, b = measured_constants(suite.blocks, b_floor)
    report = avalanche_inequalities(suite.blocks, a, b, C, c)
    exact = float(singular_exponents_exact(driver, N, seed, trial)[0])
    notes = []
    lower = None
    if report.asserted:
        lower = (report.rhs_norms - _log_inverse_norm(suite.suffix_logs)
                 - _log_inverse_norm(suite.prefix_logs)) / N
    else:
        failed = [name for name, ok in (("gap hypothesis (i)", report.hyp_i_ok),
                                        ("alignment hypothesis (ii)", report.hyp_ii_ok),
                                        ("a >= c b > c", report.precondition_ok)) if not ok]
        notes.append("avalanche bound not applicable: " + ", ".join(failed) + " failed")
    return PipelineResult(partition, report, lower, exact, notes)
