"""Primer annealing-temperature analysis.

Three estimates per primer, at increasing sophistication:

* Wallace rule, 2(A+T) + 4(G+C), length-count only.
* Salt-corrected Wallace, shifted by 16.6*log10([monovalent]/50 mM) so the
  50 mM reference condition leaves the estimate unchanged.
* Nearest-neighbor thermodynamic Tm from stacked-dinucleotide enthalpy and
  entropy sums (SantaLucia 1998 unified parameters, see data/nn_thermo.json)
  with a divalent-aware sodium equivalent and an entropic salt correction:

      Na_eq(mM) = monovalent + 120*sqrt(divalent)
      dS' = dS + 0.368*(N-1)*ln(Na_eq in mol/L)
      Tm  = 1000*dH / (dS' + R*ln(C/4)) - 273.15,  R = 1.987 cal/(mol K)

The pair report mirrors the service's saved-result block: one text value per
key, numbers rendered with shortest round-trip repr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError
from .tables import load

GAS_CONSTANT = 1.987  # cal/(mol*K)

_DNA = set("ACGT")


def _clean(sequence: str) -> str:
    if not isinstance(sequence, str) or not sequence:
        raise ValidationError("primer sequence must be non-empty", fields=["sequence"])
    seq = sequence.strip().upper()
    if not seq or set(seq) - _DNA:
        raise ValidationError(
            "primer sequence must contain only A, C, G, T", fields=["sequence"]
        )
    return seq


@dataclass(frozen=True)
class IonConditions:
    monovalent_mM: float
    divalent_mM: float
    primer_concentration_M: float

    def __post_init__(self):
        for name in ("monovalent_mM", "divalent_mM", "primer_concentration_M"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"{name} must be finite", fields=[name])
        if self.monovalent_mM < 0 or self.divalent_mM < 0:
            raise ValidationError(
                "ion concentrations must be non-negative",
                fields=["monovalent_mM", "divalent_mM"],
            )
        if self.primer_concentration_M <= 0:
            raise ValidationError(
                "primer concentration must be positive",
                fields=["primer_concentration_M"],
            )


def gc_content(sequence: str) -> float:
    """G+C percentage of the sequence."""
    seq = _clean(sequence)
    return 100.0 * sum(1 for b in seq if b in "GC") / len(seq)


def tm_wallace(sequence: str) -> int:
    """Wallace rule: 2(A+T) + 4(G+C) degrees C."""
    seq = _clean(sequence)
    at = sum(1 for b in seq if b in "AT")
    gc = len(seq) - at
    return 2 * at + 4 * gc


def tm_salt_corrected(sequence: str, ions: IonConditions) -> float:
    """Wallace estimate shifted by 16.6*log10([Na+]/50 mM)."""
    if ions.monovalent_mM <= 0:
        raise DomainError("salt correction requires a positive monovalent concentration")
    return tm_wallace(sequence) + 16.6 * math.log10(ions.monovalent_mM / 50.0)


def nn_sums(sequence: str) -> tuple[float, float]:
    """Total duplex (dH kcal/mol, dS cal/mol/K): stacks plus both initiations."""
    seq = _clean(sequence)
    if len(seq) < 2:
        raise DomainError("nearest-neighbor model needs at least two bases")
    params = load("nn_thermo")
    stacks = params["stacks"]
    init = params["initiation"]
    dh = 0.0
    ds = 0.0
    for i in range(len(seq) - 1):
        pair_dh, pair_ds = stacks[seq[i : i + 2]]
        dh += pair_dh
        ds += pair_ds
    for terminal in (seq[0], seq[-1]):
        term_dh, term_ds = init["GC" if terminal in "GC" else "AT"]
        dh += term_dh
        ds += term_ds
    return dh, ds


def sodium_equivalent_mM(ions: IonConditions) -> float:
    """Monovalent plus 120*sqrt(divalent), both in mM."""
    return ions.monovalent_mM + 120.0 * math.sqrt(ions.divalent_mM)


def tm_nearest_neighbor(sequence: str, ions: IonConditions) -> float:
    """Thermodynamic Tm in degrees C under the given ion/primer conditions."""
    dh, ds = nn_sums(sequence)
    na_eq = sodium_equivalent_mM(ions)
    if na_eq <= 0:
        raise DomainError("nearest-neighbor Tm requires a positive salt concentration")
    n_stacks = len(_clean(sequence)) - 1
    ds_corrected = ds + 0.368 * n_stacks * math.log(na_eq / 1000.0)
    denominator = ds_corrected + GAS_CONSTANT * math.log(
        ions.primer_concentration_M / 4.0
    )
    return 1000.0 * dh / denominator - 273.15


REPORT_KEYS = (
    "Left primer",
    "Right primer",
    "Left primer length",
    "Right primer length",
    "Left primer %GC",
    "Right primer %GC",
    "Left primer Tm (C)",
    "Right primer Tm (C)",
    "Left primer Tm salt corrected (C)",
    "Right primer Tm salt corrected (C)",
    "Left primer Tm kinetics (C)",
    "Right primer Tm kinetics (C)",
    "Monovalent ion concentration (mM)",
    "Divalent ion concentration (mM)",
    "Primer concentration (uM)",
)


def _span(value) -> str:
    """The 'lo to hi' range text; single-sequence analysis collapses lo == hi."""
    return f"{value} to {value}"


def analyze_primer_pair(
    left: str, right: str, ions: IonConditions
) -> list[tuple[str, str]]:
    """Ordered key/value report block for a primer pair."""
    left_seq = _clean(left)
    right_seq = _clean(right)
    values = {
        "Left primer": left_seq,
        "Right primer": right_seq,
        "Left primer length": str(len(left_seq)),
        "Right primer length": str(len(right_seq)),
        "Left primer %GC": _span(gc_content(left_seq)),
        "Right primer %GC": _span(gc_content(right_seq)),
        "Left primer Tm (C)": _span(tm_wallace(left_seq)),
        "Right primer Tm (C)": _span(tm_wallace(right_seq)),
        "Left primer Tm salt corrected (C)": _span(tm_salt_corrected(left_seq, ions)),
        "Right primer Tm salt corrected (C)": _span(tm_salt_corrected(right_seq, ions)),
        "Left primer Tm kinetics (C)": repr(tm_nearest_neighbor(left_seq, ions)),
        "Right primer Tm kinetics (C)": repr(tm_nearest_neighbor(right_seq, ions)),
        "Monovalent ion concentration (mM)": repr(float(ions.monovalent_mM)),
        "Divalent ion concentration (mM)": repr(float(ions.divalent_mM)),
        "Primer concentration (uM)": repr(float(ions.primer_concentration_M)),
    }
    return [(key, values[key]) for key in REPORT_KEYS]
