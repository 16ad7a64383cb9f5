"""Nucleotide transforms, protein property analysis, and restriction mapping.

All reference tables (genetic code, residue masses, instability weights,
flexibility B-values, pKa set, structure propensity sets, enzyme sites) ship
as versioned JSON under cynote/data with their public sources recorded.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, ValidationError
from .tables import load

_DNA = set("ACGT")
_RNA = set("ACGU")
_PROTEIN = set("ACDEFGHIKLMNPQRSTVWY")

_DNA_COMPLEMENT = str.maketrans("ACGT", "TGCA")


class TrailingCodonWarning(UserWarning):
    """Translation input length not divisible by 3; trailing bases ignored."""


def _clean_dna(sequence: str, what: str = "DNA sequence") -> str:
    if not isinstance(sequence, str) or not sequence.strip():
        raise ValidationError(f"{what} must be non-empty", fields=["sequence"])
    seq = sequence.strip().upper()
    if set(seq) - _DNA:
        raise ValidationError(f"{what} must contain only A, C, G, T", fields=["sequence"])
    return seq


def _clean_rna(sequence: str) -> str:
    if not isinstance(sequence, str) or not sequence.strip():
        raise ValidationError("RNA sequence must be non-empty", fields=["sequence"])
    seq = sequence.strip().upper()
    if set(seq) - _RNA:
        raise ValidationError("RNA sequence must contain only A, C, G, U", fields=["sequence"])
    return seq


def _clean_nucleic(sequence: str) -> str:
    """Accept DNA or RNA; returns the uppercased sequence."""
    if not isinstance(sequence, str) or not sequence.strip():
        raise ValidationError("sequence must be non-empty", fields=["sequence"])
    seq = sequence.strip().upper()
    if "U" in seq and "T" in seq:
        raise ValidationError("sequence mixes T and U", fields=["sequence"])
    alphabet = _RNA if "U" in seq else _DNA
    if set(seq) - alphabet:
        raise ValidationError("sequence contains non-nucleotide characters", fields=["sequence"])
    return seq


def clean_protein(sequence: str, allow_stop: bool = True) -> str:
    """Validate a one-letter protein sequence; a single trailing * is allowed."""
    if not isinstance(sequence, str) or not sequence.strip():
        raise ValidationError("protein sequence must be non-empty", fields=["sequence"])
    seq = sequence.strip().upper()
    body = seq[:-1] if allow_stop and seq.endswith("*") else seq
    if not body:
        raise ValidationError("protein sequence must contain residues", fields=["sequence"])
    if set(body) - _PROTEIN:
        raise ValidationError(
            "protein sequence must use the 20 standard one-letter codes",
            fields=["sequence"],
        )
    return seq


def complement(dna: str) -> str:
    return _clean_dna(dna).translate(_DNA_COMPLEMENT)


def reverse_complement(dna: str) -> str:
    return complement(dna)[::-1]


def transcribe(dna: str) -> str:
    """Coding-strand convention: T -> U only."""
    return _clean_dna(dna).replace("T", "U")


def back_transcribe(rna: str) -> str:
    return _clean_rna(rna).replace("U", "T")


def translate(na: str, stop_symbol: bool = True) -> str:
    """Translate DNA or RNA with the standard genetic code.

    A trailing partial codon is dropped with a TrailingCodonWarning. With
    stop_symbol=False translation stops before the first stop codon instead
    of emitting '*'.
    """
    seq = _clean_nucleic(na)
    if "U" in seq:
        seq = seq.replace("U", "T")
    if len(seq) % 3:
        warnings.warn(
            f"ignoring {len(seq) % 3} trailing base(s) of a partial codon",
            TrailingCodonWarning,
            stacklevel=2,
        )
        seq = seq[: len(seq) - len(seq) % 3]
    code = load("genetic_code")["codons"]
    residues = []
    for i in range(0, len(seq), 3):
        aa = code[seq[i : i + 3]]
        if aa == "*" and not stop_symbol:
            break
        residues.append(aa)
    return "".join(residues)


def back_translate(protein: str) -> str:
    """Deterministic reverse translation: lexicographically smallest codon."""
    seq = clean_protein(protein)
    code = load("genetic_code")["codons"]
    smallest: dict[str, str] = {}
    for codon in sorted(code):
        aa = code[codon]
        smallest.setdefault(aa, codon)
    return "".join(smallest[aa] for aa in seq)


def aa_composition(protein: str) -> dict[str, dict[str, float]]:
    """Residue counts and proportions; proportions sum to 1."""
    seq = clean_protein(protein).rstrip("*")
    if not seq:
        raise ValidationError("protein sequence must contain residues", fields=["sequence"])
    counts: dict[str, int] = {}
    for aa in seq:
        counts[aa] = counts.get(aa, 0) + 1
    n = len(seq)
    return {
        "counts": {aa: counts[aa] for aa in sorted(counts)},
        "proportions": {aa: counts[aa] / n for aa in sorted(counts)},
    }


def molecular_weight(protein: str) -> float:
    """Average molecular weight: residue masses plus one water."""
    seq = clean_protein(protein).rstrip("*")
    masses = load("amino_masses")
    return math.fsum(masses["residues"][aa] for aa in seq) + masses["water"]


def aromaticity(protein: str) -> float:
    """Fraction of residues in {F, W, Y}."""
    seq = clean_protein(protein).rstrip("*")
    return sum(1 for aa in seq if aa in "FWY") / len(seq)


def instability_index(protein: str) -> float:
    """(10/L) * sum of dipeptide instability weights along the chain."""
    seq = clean_protein(protein).rstrip("*")
    if len(seq) < 2:
        raise DomainError("instability index needs at least two residues")
    weights = load("instability_weights")["weights"]
    total = math.fsum(weights[seq[i]][seq[i + 1]] for i in range(len(seq) - 1))
    return 10.0 / len(seq) * total


def flexibility_profile(protein: str) -> list[float]:
    """Window-9 smoothed flexibility; center-weighted, length L - 8."""
    seq = clean_protein(protein).rstrip("*")
    table = load("flexibility")
    window = table["window"]
    if len(seq) < window:
        raise DomainError(f"flexibility profile needs at least {window} residues")
    values = table["values"]
    edge = table["edge_weights"]
    center = table["center_weight"]
    total_weight = 2.0 * math.fsum(edge) + center
    profile = []
    for i in range(len(seq) - window + 1):
        frame = seq[i : i + window]
        score = center * values[frame[window // 2]]
        for j, weight in enumerate(edge):
            score += weight * (values[frame[j]] + values[frame[window - 1 - j]])
        profile.append(score / total_weight)
    return profile


def charge_at_ph(protein: str, ph: float) -> float:
    """Henderson-Hasselbalch net charge over termini and ionizable side chains."""
    seq = clean_protein(protein).rstrip("*")
    pka = load("pka")
    groups: list[tuple[float, int]] = [tuple(pka["n_terminus"]), tuple(pka["c_terminus"])]
    side = pka["side_chains"]
    for aa in seq:
        if aa in side:
            groups.append(tuple(side[aa]))
    charge = 0.0
    for pk, sign in groups:
        if sign > 0:
            charge += 1.0 / (1.0 + 10.0 ** (ph - pk))
        else:
            charge -= 1.0 / (1.0 + 10.0 ** (pk - ph))
    return charge


def isoelectric_point(protein: str, tolerance: float = 1e-4, max_iter: int = 100) -> float:
    """Bisect pH in [0, 14] until |net charge| < tolerance."""
    lo, hi = 0.0, 14.0
    ph = 7.0
    for _ in range(max_iter):
        ph = (lo + hi) / 2.0
        charge = charge_at_ph(protein, ph)
        if abs(charge) < tolerance:
            return ph
        if charge > 0:
            lo = ph
        else:
            hi = ph
    return ph


def secondary_structure_fractions(protein: str) -> tuple[float, float, float]:
    """(helix, turn, sheet) residue fractions per the propensity sets."""
    seq = clean_protein(protein).rstrip("*")
    sets = load("structure_sets")
    helix = set(sets["helix"])
    turn = set(sets["turn"])
    sheet = set(sets["sheet"])
    n = len(seq)
    return (
        sum(1 for aa in seq if aa in helix) / n,
        sum(1 for aa in seq if aa in turn) / n,
        sum(1 for aa in seq if aa in sheet) / n,
    )


def protein_report(protein: str) -> dict:
    """The full property bundle for one protein sequence."""
    composition = aa_composition(protein)
    report = {
        "composition": composition,
        "molecular_weight": molecular_weight(protein),
        "aromaticity": aromaticity(protein),
        "isoelectric_point": isoelectric_point(protein),
        "secondary_structure_fractions": secondary_structure_fractions(protein),
    }
    body = clean_protein(protein).rstrip("*")
    report["instability_index"] = instability_index(protein) if len(body) >= 2 else None
    report["flexibility_profile"] = (
        flexibility_profile(protein) if len(body) >= 9 else None
    )
    return report


@dataclass(frozen=True)
class RestrictionEnzyme:
    name: str
    recognition_site: str
    cut_offset: int

    def __post_init__(self):
        site = self.recognition_site
        if not site or set(site) - _DNA:
            raise ValidationError("recognition site must be DNA", fields=["recognition_site"])
        if len(site) < 4:
            raise ValidationError("recognition site must be at least 4 bases", fields=["recognition_site"])
        if site != reverse_complement(site):
            raise ValidationError("recognition site must be palindromic", fields=["recognition_site"])
        if not 0 <= self.cut_offset <= len(site):
            raise ValidationError("cut offset must lie within the site", fields=["cut_offset"])


def default_enzymes() -> list[RestrictionEnzyme]:
    return [
        RestrictionEnzyme(e["name"], e["site"], e["cut_offset"])
        for e in load("restriction_enzymes")["enzymes"]
    ]


def restriction_map(
    dna: str, enzymes: list[RestrictionEnzyme] | None = None
) -> list[tuple[str, int, int]]:
    """All exact site occurrences, overlaps included.

    Returns (enzyme name, 1-based site position, 1-based index of the last
    base before the cut), ascending by position then name.
    """
    seq = _clean_dna(dna)
    if enzymes is None:
        enzymes = default_enzymes()
    hits = []
    for enzyme in enzymes:
        site = enzyme.recognition_site
        start = seq.find(site)
        while start != -1:
            position = start + 1
            hits.append((enzyme.name, position, position + enzyme.cut_offset - 1))
            start = seq.find(site, start + 1)
    hits.sort(key=lambda h: (h[1], h[0]))
    return hits
