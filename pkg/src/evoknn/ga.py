"""Genetic search over binary feature masks, scored by k-NN recognition.

The fitness of an individual is ``alpha * hits - beta * nf``: the number of
correctly recognised evaluation samples, traded off against the number of
active features.  The loop is a canonical generational GA (tournament
selection, single-point crossover, bit-flip mutation, elitism) made fully
reproducible: one seeded generator drives every stochastic draw in a fixed
order, and fitness evaluation is pure so it may run in parallel without
changing any recorded value.

Draw order per run: population init (per chromosome: L uniform bit coins,
plus one repair index if all bits came up 0), then per bred pair: parent A
tournament indices, parent B tournament indices, crossover coin, cut point
(only when crossing and L >= 2), then for each of the two children a
mutation coin followed (only when mutating) by L flip coins and a repair
index if needed.  A child that is still all-zero after its mutation step
(crossover can cut two sparse parents into an empty child, and the mutation
coin may skip) draws one extra repair index before it can be evaluated.
Both children are always drawn even when only one slot remains.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .dataset import Dataset
from .knn import FeatureMask, recognition_rate


@dataclass(frozen=True)
class Chromosome:
    """Bit-string genotype; decodes one-to-one into a FeatureMask."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("chromosome must be a non-empty 1D bit string")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return self.bits.size

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())

    def decode(self) -> FeatureMask:
        return FeatureMask(self.bits)

    def __eq__(self, other):
        return isinstance(other, Chromosome) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())


@dataclass(frozen=True)
class Individual:
    chromosome: Chromosome
    fitness: float
    hits: int
    nf: int


@dataclass(frozen=True)
class GaConfig:
    """Evolution parameters.

    Defaults mirror the reference 117-feature configuration: population 50,
    crossover probability 1.0, per-chromosome mutation probability 0.9,
    alpha = beta = 0.6, k = 1, seed 12957, budget 814 generations.
    ``per_bit_flip_rate=None`` resolves to 1/L at run time.  ``mutation_prob``
    is the probability a chromosome is mutated at all; the flip rate then
    applies independently per bit.
    """

    population_size: int = 50
    max_generations: int = 814
    crossover_prob: float = 1.0
    mutation_prob: float = 0.9
    per_bit_flip_rate: Optional[float] = None
    alpha: float = 0.6
    beta: float = 0.6
    k: int = 1
    seed: int = 12957
    elite_count: int = 1
    tournament_size: int = 2
    stop_on_fitness: Optional[float] = None
    stall_generations: Optional[int] = None

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.max_generations < 0:
            raise ValueError("max_generations must be non-negative")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.per_bit_flip_rate is not None and not 0.0 < self.per_bit_flip_rate <= 1.0:
            raise ValueError("per_bit_flip_rate must be in (0, 1]")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be in 0..population_size-1")
        if not 2 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must be in 2..population_size")
        if self.stall_generations is not None and self.stall_generations < 1:
            raise ValueError("stall_generations must be positive")
        if abs(self.alpha + self.beta - 1.0) > 1e-12:
            warnings.warn(
                f"alpha + beta = {self.alpha + self.beta:g} differs from 1; "
                "continuing with the values as given",
                UserWarning,
                stacklevel=2,
            )

    def flip_rate(self, length: int) -> float:
        return self.per_bit_flip_rate if self.per_bit_flip_rate is not None else 1.0 / length


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: float
    median_fitness: float
    min_fitness: float
    best_nf: int
    best_hits: int
    best_mask: FeatureMask


TRACE_COLUMNS = (
    "generation",
    "best_fitness",
    "median_fitness",
    "min_fitness",
    "best_nf",
    "best_hits",
    "best_mask",
)


def fitness(
    ch: Chromosome, train: Dataset, eval_set: Dataset, cfg: GaConfig
) -> tuple[float, int, int]:
    """Evaluate one chromosome: (alpha*hits - beta*nf, hits, nf)."""
    nf = ch.popcount
    if nf == 0:
        raise ValueError("all-zero chromosome must be repaired before evaluation")
    hits, _, _ = recognition_rate(train, eval_set, cfg.k, ch.decode())
    return cfg.alpha * hits - cfg.beta * nf, hits, nf


def _repair(bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if not bits.any():
        bits[int(rng.integers(0, bits.size))] = True
    return bits


def _ensure_nonempty(ch: Chromosome, rng: np.random.Generator) -> Chromosome:
    # fitness is undefined for an empty mask, so every bred child is
    # repaired before evaluation; almost always a no-op
    if ch.popcount:
        return ch
    return Chromosome(_repair(ch.bits.copy(), rng))


def init_population(cfg: GaConfig, length: int, rng: np.random.Generator) -> list[Chromosome]:
    """Uniform random chromosomes; all-zero draws get one random bit set."""
    if length < 1:
        raise ValueError("chromosome length must be positive")
    pop = []
    for _ in range(cfg.population_size):
        bits = rng.random(length) < 0.5
        pop.append(Chromosome(_repair(bits, rng)))
    return pop


def tournament_select(
    pop: list[Individual], cfg: GaConfig, rng: np.random.Generator
) -> Individual:
    """Best of ``tournament_size`` uniform draws (with replacement).

    Fitness ties go to the lower population index, keeping selection a total
    order even when many individuals share a fitness value.
    """
    draws = rng.integers(0, len(pop), size=cfg.tournament_size)
    best = min(draws, key=lambda i: (-pop[i].fitness, i))
    return pop[int(best)]


def crossover(
    a: Chromosome, b: Chromosome, cfg: GaConfig, rng: np.random.Generator
) -> tuple[Chromosome, Chromosome]:
    """Single-point crossover with probability ``crossover_prob``, else copies.

    The cut position is uniform over 1..L-1, so both children always receive
    material from both parents; length-1 chromosomes have no interior cut and
    pass through unchanged.
    """
    if a.length != b.length:
        raise ValueError("parents must have equal length")
    if rng.random() < cfg.crossover_prob and a.length >= 2:
        cut = int(rng.integers(1, a.length))
        c1 = np.concatenate([a.bits[:cut], b.bits[cut:]])
        c2 = np.concatenate([b.bits[:cut], a.bits[cut:]])
        return Chromosome(c1), Chromosome(c2)
    return a, b


def mutate(ch: Chromosome, cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    """With probability ``mutation_prob``, flip each bit at the per-bit rate.

    An all-zero result is repaired by setting one uniformly chosen bit, so
    every chromosome handed to fitness evaluation has popcount >= 1.
    """
    if rng.random() >= cfg.mutation_prob:
        return ch
    flips = rng.random(ch.length) < cfg.flip_rate(ch.length)
    bits = ch.bits ^ flips
    return Chromosome(_repair(bits, rng))


class _Evaluator:
    """Caches fitness by chromosome bits; optional parallel batch evaluation.

    Evaluation is a pure function of (chromosome, datasets, cfg), so thread
    scheduling cannot change any value: results are keyed by chromosome and
    reassembled in population order.
    """

    def __init__(self, train: Dataset, eval_set: Dataset, cfg: GaConfig, parallel: bool):
        self.train = train
        self.eval_set = eval_set
        self.cfg = cfg
        self.parallel = parallel
        self.cache: dict[bytes, tuple[float, int, int]] = {}

    def evaluate(self, chroms: list[Chromosome]) -> list[Individual]:
        fresh: list[Chromosome] = []
        seen = set()
        for ch in chroms:
            key = ch.bits.tobytes()
            if key not in self.cache and key not in seen:
                seen.add(key)
                fresh.append(ch)
        if self.parallel and len(fresh) > 1:
            with ThreadPoolExecutor() as pool:
                results = list(
                    pool.map(lambda c: fitness(c, self.train, self.eval_set, self.cfg), fresh)
                )
        else:
            results = [fitness(c, self.train, self.eval_set, self.cfg) for c in fresh]
        for ch, res in zip(fresh, results):
            self.cache[ch.bits.tobytes()] = res
        return [
            Individual(ch, *self.cache[ch.bits.tobytes()]) for ch in chroms
        ]


def _summarize(generation: int, pop: list[Individual]) -> GenerationStats:
    best_i = min(range(len(pop)), key=lambda i: (-pop[i].fitness, i))
    best = pop[best_i]
    fits = np.asarray([ind.fitness for ind in pop])
    return GenerationStats(
        generation=generation,
        best_fitness=best.fitness,
        median_fitness=float(np.median(fits)),
        min_fitness=float(fits.min()),
        best_nf=best.nf,
        best_hits=best.hits,
        best_mask=best.chromosome.decode(),
    )


def evolve(
    train: Dataset,
    eval_set: Dataset,
    cfg: GaConfig,
    parallel: bool = False,
    on_generation: Optional[Callable[[GenerationStats], None]] = None,
) -> tuple[Individual, list[GenerationStats]]:
    """Run the generational loop; returns the best individual ever seen.

    Each generation is evaluated and recorded, then the stop rules fire in
    order: target fitness reached, best-fitness stall, generation budget.
    Otherwise the ``elite_count`` best survive unchanged and the remainder is
    refilled with mutated crossover offspring of tournament winners.  The
    trace holds one entry per evaluated generation, the initial population
    included, and is identical for serial and parallel evaluation.
    """
    if train.feature_count < 1:
        raise ValueError("training set must have at least one feature")
    length = train.feature_count
    rng = np.random.default_rng(cfg.seed)
    evaluator = _Evaluator(train, eval_set, cfg, parallel)

    population = evaluator.evaluate(init_population(cfg, length, rng))
    trace: list[GenerationStats] = []
    best_ever: Optional[Individual] = None
    stall = 0

    for gen in range(cfg.max_generations + 1):
        stats = _summarize(gen, population)
        trace.append(stats)
        if on_generation is not None:
            on_generation(stats)
        gen_best = max(population, key=lambda ind: ind.fitness)
        if best_ever is None or gen_best.fitness > best_ever.fitness:
            best_ever = gen_best
            stall = 0
        else:
            stall += 1
        if cfg.stop_on_fitness is not None and stats.best_fitness >= cfg.stop_on_fitness:
            break
        if cfg.stall_generations is not None and stall >= cfg.stall_generations:
            break
        if gen == cfg.max_generations:
            break

        order = sorted(range(len(population)), key=lambda i: (-population[i].fitness, i))
        elites = [population[i] for i in order[: cfg.elite_count]]
        need = cfg.population_size - len(elites)
        offspring: list[Chromosome] = []
        while len(offspring) < need:
            pa = tournament_select(population, cfg, rng)
            pb = tournament_select(population, cfg, rng)
            c1, c2 = crossover(pa.chromosome, pb.chromosome, cfg, rng)
            c1 = _ensure_nonempty(mutate(c1, cfg, rng), rng)
            c2 = _ensure_nonempty(mutate(c2, cfg, rng), rng)
            offspring.append(c1)
            if len(offspring) < need:
                offspring.append(c2)
        population = elites + evaluator.evaluate(offspring)

    assert best_ever is not None
    return best_ever, trace


def exhaustive_best(
    train: Dataset, eval_set: Dataset, cfg: GaConfig, max_length: int = 15
) -> tuple[FeatureMask, float, int, int]:
    """Evaluate every non-empty feature subset; the global fitness optimum.

    Guarded to ``feature_count <= max_length`` since the subset count doubles
    per feature.  Ties are broken by fewer active features, then by the
    lexicographically smaller mask string.
    """
    length = train.feature_count
    if length > max_length:
        raise ValueError(
            f"feature count {length} exceeds the exhaustive guard of {max_length}"
        )
    best: Optional[tuple[float, int, tuple, int]] = None  # fitness, nf, bits, hits
    for m in range(1, 1 << length):
        bits = np.array([(m >> n) & 1 for n in range(length)], dtype=bool)
        ch = Chromosome(bits)
        fit, hits, nf = fitness(ch, train, eval_set, cfg)
        key = (fit, nf, tuple(bits), hits)
        if best is None or _beats(key, best):
            best = key
    assert best is not None
    fit, nf, bits, hits = best
    return FeatureMask(np.asarray(bits, dtype=bool)), fit, hits, nf


def _beats(candidate: tuple, incumbent: tuple) -> bool:
    if candidate[0] != incumbent[0]:
        return candidate[0] > incumbent[0]
    if candidate[1] != incumbent[1]:
        return candidate[1] < incumbent[1]
    return candidate[2] < incumbent[2]


def write_trace(trace: list[GenerationStats], path) -> None:
    """Write the per-generation trace CSV (one row per generation).

    Floats are written with ``repr`` so replayed runs produce byte-identical
    files.
    """
    lines = [",".join(TRACE_COLUMNS)]
    for s in trace:
        lines.append(
            ",".join([
                str(s.generation),
                repr(s.best_fitness),
                repr(s.median_fitness),
                repr(s.min_fitness),
                str(s.best_nf),
                str(s.best_hits),
                s.best_mask.to_string(),
            ])
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
