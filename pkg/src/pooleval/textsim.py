"""Character n-gram TF-IDF similarity between caption sets.

Pins the whole pipeline bit-exactly so profiles are reproducible:

* preprocessing lowercases, collapses whitespace runs to single spaces, and
  strips the ends; n-grams run across word boundaries, spaces included;
* idf(t) = ln((1 + N) / (1 + df(t))) + 1 over the fit corpus;
* vectors are raw term counts times idf, L2-normalized, with dot products
  accumulated over sorted n-grams so results do not depend on hash order.

The standard workflow fits the encoder on the evaluation-side captions and
profiles each of them by the mean cosine similarity of its k most similar
training captions, then correlates that profile with caption length.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Query, ValidationWarning
from .stats import kendall, spearman

FORMAT_VERSION = 1


def normalize_caption(text: str) -> str:
    return " ".join(text.lower().split())


def char_ngrams(text: str, n: int) -> list[str]:
    normalized = normalize_caption(text)
    return [normalized[i : i + n] for i in range(len(normalized) - n + 1)]


@dataclass(frozen=True)
class NgramEncoder:
    """Fitted vocabulary with idf weights; immutable after fit."""

    n: int
    idf: Mapping[str, float]

    def vector(self, text: str) -> dict[str, float]:
        """Unit-L2 TF-IDF vector over the fitted vocabulary. Captions with no
        in-vocabulary n-grams come out as the zero vector (empty dict)."""
        counts: dict[str, int] = {}
        for gram in char_ngrams(text, self.n):
            if gram in self.idf:
                counts[gram] = counts.get(gram, 0) + 1
        weights = {gram: counts[gram] * self.idf[gram] for gram in sorted(counts)}
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm == 0.0:
            return {}
        return {gram: w / norm for gram, w in weights.items()}


def fit_encoder(fit_corpus: Sequence[str], n: int = 5) -> NgramEncoder:
    """Fit vocabulary and idf weights on a caption corpus."""
    if n < 1:
        raise ValueError(f"n-gram size must be >= 1, got {n}")
    if not fit_corpus:
        raise ValueError("fit corpus is empty")
    df: dict[str, int] = {}
    too_short = 0
    for caption in fit_corpus:
        grams = set(char_ngrams(caption, n))
        if not grams:
            too_short += 1
            continue
        for gram in grams:
            df[gram] = df.get(gram, 0) + 1
    if too_short:
        warnings.warn(
            f"{too_short} caption(s) shorter than {n} characters contribute no "
            "n-grams",
            ValidationWarning,
        )
    n_docs = len(fit_corpus)
    idf = {
        gram: math.log((1 + n_docs) / (1 + count)) + 1.0
        for gram, count in sorted(df.items())
    }
    return NgramEncoder(n=n, idf=idf)


def cosine(u: Mapping[str, float], v: Mapping[str, float]) -> float:
    """Dot product of unit vectors, accumulated in sorted-key order.

    Equal vectors short-circuit to exactly 1 (their cosine by definition),
    sidestepping accumulation rounding; the zero vector scores 0 against
    everything, itself included.
    """
    if u == v:
        return 1.0 if u else 0.0
    if len(v) < len(u):
        u, v = v, u
    return sum(w * v[gram] for gram, w in sorted(u.items()) if gram in v)


@dataclass(frozen=True)
class SimilarityProfile:
    """Per-query mean cosine similarity of the top-k most similar train
    captions."""

    k: int
    values: Mapping[str, float]

    def to_csv(self, queries: Mapping[str, Query]) -> str:
        rows = ["query_id,mean_top_k_sim,word_len,char_len"]
        for qid in sorted(self.values):
            q = queries[qid]
            rows.append(f"{qid},{self.values[qid]!r},{q.word_length},{q.char_length}")
        return "\n".join(rows) + "\n"


def similarity_profile(
    encoder: NgramEncoder,
    test_captions: Mapping[str, str],
    train_captions: Iterable[str],
    k: int = 10,
    threads: int = 1,
) -> SimilarityProfile:
    """Mean of each test caption's k highest train-caption similarities.

    With fewer than k train captions, the mean runs over all of them. A test
    caption with the zero vector scores 0 against everything.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    train_vecs = [encoder.vector(c) for c in train_captions]
    if not train_vecs:
        raise ValueError("train caption set is empty")

    def profile_one(qid: str) -> tuple[str, float]:
        vec = encoder.vector(test_captions[qid])
        sims = sorted((cosine(vec, tv) for tv in train_vecs), reverse=True)
        top = sims[:k]
        return qid, sum(top) / len(top)

    qids = sorted(test_captions)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = dict(pool.map(profile_one, qids))
    else:
        values = dict(profile_one(qid) for qid in qids)
    return SimilarityProfile(k=k, values=values)


@dataclass(frozen=True)
class LengthCorrelation:
    spearman_word: float | None
    kendall_word: float | None
    spearman_char: float | None
    kendall_char: float | None

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "report": "textsim",
            "spearman_word": self.spearman_word,
            "kendall_word": self.kendall_word,
            "spearman_char": self.spearman_char,
            "kendall_char": self.kendall_char,
        }


def length_similarity_correlation(
    profile: SimilarityProfile, queries: Mapping[str, Query]
) -> LengthCorrelation:
    """Rank correlations between similarity profile and caption length, in
    words and in characters. Degenerate inputs yield None entries."""
    qids = sorted(set(profile.values) & set(queries))
    if len(qids) < 2:
        raise ValueError("need at least two queries shared by profile and query set")
    sims = [profile.values[q] for q in qids]
    words = [float(queries[q].word_length) for q in qids]
    chars = [float(queries[q].char_length) for q in qids]
    return LengthCorrelation(
        spearman_word=spearman(sims, words),
        kendall_word=kendall(sims, words),
        spearman_char=spearman(sims, chars),
        kendall_char=kendall(sims, chars),
    )
