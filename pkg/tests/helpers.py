"""Shared random fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own algorithms: the
alignment oracle tries every monotone op sequence, the selection oracle
walks all binary assignments, and the binomial oracle works in exact
rational arithmetic.
"""

import random
from collections import Counter
from fractions import Fraction
from math import comb

from gecmerge import AnnotatedSentence, Edit, M2Corpus, spans_overlap
from gecmerge.combine import CellStats, StatsTable, Subset, SystemOutput

VOCAB = (
    "the a an cat dog sat on mat he she it go goes home fast very in at "
    "big red blue ran runs quickly slowly . , ! good great New new"
).split()

ETYPES = ("M:DET", "U:DET", "R:VERB", "R:SPELL", "R:OTHER", "M:PUNCT", "R:PREP")


def random_tokens(rng: random.Random, lo: int = 3, hi: int = 9) -> tuple[str, ...]:
    return tuple(rng.choice(VOCAB) for _ in range(rng.randint(lo, hi)))


def random_edits(rng: random.Random, n_tokens: int, max_edits: int = 3, annotator: int = 0):
    """A valid (pairwise non-overlapping) random edit set for one sentence."""
    edits: list[Edit] = []
    for _ in range(rng.randint(0, max_edits)):
        for _attempt in range(12):
            if rng.random() < 0.25 or n_tokens == 0:
                start = end = rng.randint(0, n_tokens)
                replacement = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 2)))
            else:
                start = rng.randrange(n_tokens)
                end = min(n_tokens, start + rng.randint(1, 2))
                if rng.random() < 0.25:
                    replacement = ""
                else:
                    replacement = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 2)))
            cand = Edit(start, end, rng.choice(ETYPES), replacement, annotator)
            if all(not spans_overlap(cand.start, cand.end, e.start, e.end) for e in edits):
                edits.append(cand)
                break
    return tuple(edits)


def random_corpus(
    rng: random.Random,
    min_sentences: int = 1,
    max_sentences: int = 6,
    annotators: tuple[int, ...] = (0,),
    max_edits: int = 3,
) -> M2Corpus:
    sentences = []
    for _ in range(rng.randint(min_sentences, max_sentences)):
        tokens = random_tokens(rng)
        edits: list[Edit] = []
        for annotator in annotators:
            edits.extend(random_edits(rng, len(tokens), max_edits, annotator))
        sentences.append(AnnotatedSentence(tokens, tuple(edits)))
    return M2Corpus(tuple(sentences))


def random_system_pair(rng: random.Random, min_sentences: int = 2, max_sentences: int = 6):
    """Two systems over shared sources, with some corrections in common.

    Cross-system overlapping-but-different edits are possible, which is
    what partition algebra tests need.
    """
    sents_a, sents_b = [], []
    for _ in range(rng.randint(min_sentences, max_sentences)):
        tokens = random_tokens(rng)
        shared = random_edits(rng, len(tokens), max_edits=3)
        a = [e for e in shared if rng.random() < 0.7]
        b = [e for e in shared if rng.random() < 0.7]
        for target in (a, b):
            for e in random_edits(rng, len(tokens), max_edits=2):
                if all(not spans_overlap(e.start, e.end, x.start, x.end) for x in target):
                    target.append(e)
        sents_a.append(AnnotatedSentence(tokens, tuple(a)))
        sents_b.append(AnnotatedSentence(tokens, tuple(b)))
    return (
        SystemOutput("a", M2Corpus(tuple(sents_a))),
        SystemOutput("b", M2Corpus(tuple(sents_b))),
    )


def slot_fixture(rng: random.Random, n_systems: int = 2, n_sentences: int = 8):
    """Systems and gold drawn from shared per-sentence edit slots.

    Each slot carries one canonical edit; every corpus either proposes a
    slot's edit verbatim or skips it. Any two corpora's edits therefore
    coincide exactly (same key and label) or touch disjoint spans, so
    combining never needs overlap arbitration and the counted statistics
    match the applied corpora exactly, which the dev-set dominance
    argument relies on.
    """
    gold_sents = []
    system_sents: list[list[AnnotatedSentence]] = [[] for _ in range(n_systems)]
    for _ in range(n_sentences):
        tokens = random_tokens(rng, 4, 10)
        slots: list[Edit] = []
        pos = 0
        while pos < len(tokens) and len(slots) < 4:
            roll = rng.random()
            if roll < 0.2:
                slots.append(Edit(pos, pos, rng.choice(ETYPES), rng.choice(VOCAB)))
                pos += 1
            elif roll < 0.75:
                start = pos
                end = min(len(tokens), start + rng.randint(1, 2))
                if rng.random() < 0.25:
                    replacement = ""
                else:
                    replacement = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 2)))
                slots.append(Edit(start, end, rng.choice(ETYPES), replacement))
                pos = end + 1
            else:
                pos += 1
        gold_sents.append(
            AnnotatedSentence(tokens, tuple(e for e in slots if rng.random() < 0.6))
        )
        for k in range(n_systems):
            system_sents[k].append(
                AnnotatedSentence(tokens, tuple(e for e in slots if rng.random() < 0.5))
            )
    gold = M2Corpus(tuple(gold_sents))
    systems = [
        SystemOutput(f"sys{k}", M2Corpus(tuple(system_sents[k])))
        for k in range(n_systems)
    ]
    return systems, gold


def perturb_tokens(rng: random.Random, tokens) -> list[str]:
    """Random token-level corruption for alignment round-trip tests."""
    out: list[str] = []
    for tok in tokens:
        roll = rng.random()
        if roll < 0.12:
            pass  # drop the token
        elif roll < 0.22:
            out.append(rng.choice(VOCAB))
        elif roll < 0.30:
            flipped = tok.upper() if tok == tok.lower() else tok.lower()
            out.append(flipped)
        else:
            out.append(tok)
        if rng.random() < 0.12:
            out.append(rng.choice(VOCAB))
    return out


def exhaustive_alignment_cost(source, target) -> float:
    """Minimum alignment cost by trying every monotone op sequence."""
    best = [float("inf")]
    n, m = len(source), len(target)

    def rec(i: int, j: int, cost: float) -> None:
        if cost >= best[0]:
            return
        if i == n and j == m:
            best[0] = cost
            return
        if i < n and j < m:
            if source[i] == target[j]:
                step = 0.0
            elif source[i].lower() == target[j].lower():
                step = 0.5
            else:
                step = 1.0
            rec(i + 1, j + 1, cost + step)
        if i < n:
            rec(i + 1, j, cost + 1.0)
        if j < m:
            rec(i, j + 1, cost + 1.0)

    rec(0, 0, 0.0)
    return best[0]


def brute_force_best_f(cells, gold_total: int, beta: float) -> float:
    """Maximum F over all 2^n binary cell selections, via a Gray-code walk."""
    b2 = beta * beta
    n = len(cells)
    tp = fp = 0
    selected = [False] * n
    best = 0.0
    for i in range(1, 1 << n):
        bit = (i & -i).bit_length() - 1
        if selected[bit]:
            tp -= cells[bit].tp
            fp -= cells[bit].fp
            selected[bit] = False
        else:
            tp += cells[bit].tp
            fp += cells[bit].fp
            selected[bit] = True
        if tp > 0:
            f = (1 + b2) * tp / (tp + fp + b2 * gold_total)
            if f > best:
                best = f
    return best


def policy_f(policy, gold_total: int) -> float:
    """F achieved by a policy's recorded selection over its own stats."""
    b2 = policy.beta * policy.beta
    tp = sum(e.tp for e in policy.entries.values() if e.s >= 1.0)
    fp = sum(e.fp for e in policy.entries.values() if e.s >= 1.0)
    if tp == 0:
        return 0.0
    return (1 + b2) * tp / (tp + fp + b2 * gold_total)


def random_stats_table(rng: random.Random, max_cells: int = 12, max_count: int = 50) -> StatsTable:
    n_types = rng.randint(1, 4)
    types = [f"T{i}" for i in range(n_types)]
    combos = [(t, s) for t in types for s in Subset]
    rng.shuffle(combos)
    n_cells = rng.randint(1, min(max_cells, len(combos)))
    cells = []
    tp_per_type: Counter[str] = Counter()
    for etype, subset in combos[:n_cells]:
        tp = rng.randint(0, max_count)
        fp = rng.randint(0, max_count)
        if tp == 0 and fp == 0:
            fp = 1
        cells.append(CellStats(etype, subset, tp, fp))
        tp_per_type[etype] += tp
    gold_per_type = {t: tp_per_type[t] + rng.randint(0, 10) for t in types}
    cells.sort(key=lambda c: (c.etype, c.subset.value))
    return StatsTable(tuple(cells), gold_per_type, sum(gold_per_type.values()))


def binomial_deviation_oracle(n: int, p: float, delta: float) -> float:
    """Exact-rational P(|X/n - p| >= delta) for X ~ Binomial(n, p)."""
    P, D = Fraction(p), Fraction(delta)
    total = Fraction(0)
    for k in range(n + 1):
        if abs(Fraction(k, n) - P) >= D:
            total += comb(n, k) * P**k * (1 - P) ** (n - k)
    return float(total)
