import math
import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cynote.errors import DomainError, ValidationError
from cynote.sequence import (
    RestrictionEnzyme,
    TrailingCodonWarning,
    aa_composition,
    aromaticity,
    back_transcribe,
    back_translate,
    charge_at_ph,
    complement,
    default_enzymes,
    flexibility_profile,
    instability_index,
    isoelectric_point,
    molecular_weight,
    protein_report,
    restriction_map,
    reverse_complement,
    secondary_structure_fractions,
    transcribe,
    translate,
)
from cynote.tables import load

from .oracles import naive_site_scan

dna = st.text(alphabet="ACGT", min_size=1, max_size=90)
protein = st.text(alphabet="ACDEFGHIKLMNPQRSTVWY", min_size=1, max_size=60)


class TestTransforms:
    def test_examples(self):
        assert complement("ATGC") == "TACG"
        assert reverse_complement("ATGC") == "GCAT"
        assert transcribe("ATGC") == "AUGC"
        assert back_transcribe("AUGC") == "ATGC"

    @given(dna)
    @settings(max_examples=300, deadline=None)
    def test_involutions_and_roundtrips(self, seq):
        assert complement(complement(seq)) == seq
        assert reverse_complement(reverse_complement(seq)) == seq
        assert back_transcribe(transcribe(seq)) == seq
        assert len(complement(seq)) == len(seq)

    def test_alphabet_enforced(self):
        with pytest.raises(ValidationError):
            complement("ATGU")
        with pytest.raises(ValidationError):
            back_transcribe("ATGT")


class TestTranslation:
    def test_examples(self):
        assert translate("ATGAAA") == "MK"
        assert translate("ATGTAA") == "M*"
        assert translate("AUGAAA") == "MK"
        assert translate("ATGTAAAAA", stop_symbol=False) == "M"

    def test_partial_codon_warns(self):
        with pytest.warns(TrailingCodonWarning):
            assert translate("ATGAA") == "M"

    def test_back_translate_examples(self):
        assert back_translate("M") == "ATG"
        assert back_translate("MK") == "ATGAAA"

    @given(protein)
    @settings(max_examples=300, deadline=None)
    def test_back_translate_round_trip(self, seq):
        assert translate(back_translate(seq)) == seq

    @given(dna.filter(lambda s: len(s) % 3 == 0))
    @settings(max_examples=200, deadline=None)
    def test_translation_length(self, seq):
        assert len(translate(seq)) == len(seq) // 3


class TestComposition:
    def test_example(self):
        out = aa_composition("AAG")
        assert out["counts"] == {"A": 2, "G": 1}
        assert out["proportions"]["A"] == pytest.approx(2 / 3)
        assert out["proportions"]["G"] == pytest.approx(1 / 3)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            aa_composition("")

    @given(protein)
    @settings(max_examples=200, deadline=None)
    def test_proportions_sum_to_one(self, seq):
        out = aa_composition(seq)
        assert math.fsum(out["proportions"].values()) == pytest.approx(1.0, abs=1e-12)


class TestMolecularWeight:
    def test_glycine(self):
        assert molecular_weight("G") == pytest.approx(75.07, abs=0.01)
        assert molecular_weight("GG") == pytest.approx(132.12, abs=0.01)

    def test_invalid_letter(self):
        with pytest.raises(ValidationError):
            molecular_weight("AB")

    @given(protein)
    @settings(max_examples=100, deadline=None)
    def test_equals_residue_sum_plus_water(self, seq):
        masses = load("amino_masses")
        expected = sum(masses["residues"][aa] for aa in seq) + masses["water"]
        assert molecular_weight(seq) == pytest.approx(expected, rel=1e-12)


class TestAromaticity:
    def test_examples(self):
        assert aromaticity("FWY") == 1.0
        assert aromaticity("FWYA") == 0.75
        assert aromaticity("AAAA") == 0.0


class TestInstability:
    def test_single_pair_lookup(self):
        weights = load("instability_weights")["weights"]
        assert instability_index("GG") == pytest.approx(5.0 * weights["G"]["G"])
        assert weights["G"]["G"] == 13.34

    def test_too_short(self):
        with pytest.raises(DomainError):
            instability_index("G")

    def test_hand_sum_oracle_on_random_sequences(self):
        rng = random.Random(11)
        weights = load("instability_weights")["weights"]
        letters = "ACDEFGHIKLMNPQRSTVWY"
        for _ in range(5):
            seq = "".join(rng.choice(letters) for _ in range(10))
            expected = 0.0
            for first, second in zip(seq, seq[1:]):
                expected += weights[first][second]
            expected *= 10.0 / len(seq)
            assert instability_index(seq) == pytest.approx(expected, rel=1e-12)


class TestFlexibility:
    def test_window_edges(self):
        assert len(flexibility_profile("A" * 9)) == 1
        with pytest.raises(DomainError):
            flexibility_profile("A" * 8)

    def test_homopolymer_is_constant(self):
        values = load("flexibility")["values"]
        profile = flexibility_profile("K" * 30)
        assert len(profile) == 22
        for point in profile:
            assert point == pytest.approx(values["K"], rel=1e-12)

    @given(protein.filter(lambda s: len(s) >= 9))
    @settings(max_examples=100, deadline=None)
    def test_profile_length(self, seq):
        assert len(flexibility_profile(seq)) == len(seq) - 8


class TestIsoelectricPoint:
    def test_glycylglycine_is_terminal_midpoint(self):
        pka = load("pka")
        midpoint = (pka["n_terminus"][0] + pka["c_terminus"][0]) / 2.0
        assert isoelectric_point("GG") == pytest.approx(midpoint, abs=1e-3)

    def test_residual_charge_below_tolerance(self):
        rng = random.Random(7)
        letters = "ACDEFGHIKLMNPQRSTVWY"
        for _ in range(25):
            seq = "".join(rng.choice(letters) for _ in range(rng.randint(2, 40)))
            ph = isoelectric_point(seq)
            assert abs(charge_at_ph(seq, ph)) < 1e-4

    @given(protein)
    @settings(max_examples=100, deadline=None)
    def test_adding_lysine_never_lowers_pi(self, seq):
        assume(charge_at_ph(seq + "K", 14.0) < 0)
        assert isoelectric_point(seq + "K") >= isoelectric_point(seq) - 1e-6


class TestStructureFractions:
    def test_examples(self):
        assert secondary_structure_fractions("VVNN") == (0.5, 0.5, 0.0)
        assert secondary_structure_fractions("RRRR") == (0.0, 0.0, 0.0)

    @given(protein)
    @settings(max_examples=100, deadline=None)
    def test_fractions_in_unit_interval(self, seq):
        for fraction in secondary_structure_fractions(seq):
            assert 0.0 <= fraction <= 1.0


class TestProteinReport:
    def test_bundles_everything(self):
        report = protein_report("MKWVTFISLLFLFSSAYS")
        assert report["molecular_weight"] > 0
        assert 0 <= report["aromaticity"] <= 1
        assert report["instability_index"] is not None
        assert len(report["flexibility_profile"]) == 10
        assert 0 < report["isoelectric_point"] < 14

    def test_short_sequences_skip_windowed_metrics(self):
        report = protein_report("MK")
        assert report["flexibility_profile"] is None
        assert report["instability_index"] is not None


class TestRestriction:
    def test_ecori_definition(self):
        ecori = next(e for e in default_enzymes() if e.name == "EcoRI")
        assert restriction_map("GAATTC", [ecori]) == [("EcoRI", 1, 1)]
        assert restriction_map("AAAA", [ecori]) == []
        assert restriction_map("GAATTCGAATTC", [ecori]) == [
            ("EcoRI", 1, 1),
            ("EcoRI", 7, 7),
        ]

    def test_overlapping_sites(self):
        # CCCGGG overlapping run: SmaI sites at 1 and 2 in CCCCGGGG? site is CCCGGG
        smai = next(e for e in default_enzymes() if e.name == "SmaI")
        hits = restriction_map("CCCCGGGG", [smai])
        assert [h[1] for h in hits] == naive_site_scan("CCCCGGGG", "CCCGGG")

    def test_non_palindromic_site_rejected(self):
        with pytest.raises(ValidationError):
            RestrictionEnzyme("BadI", "GATC" + "A", 1)

    def test_matches_naive_scan_on_random_dna(self):
        rng = random.Random(99)
        enzymes = default_enzymes()
        for _ in range(50):
            seq = "".join(rng.choice("ACGT") for _ in range(rng.randint(10, 400)))
            got = restriction_map(seq, enzymes)
            expected = []
            for enzyme in enzymes:
                for pos in naive_site_scan(seq, enzyme.recognition_site):
                    expected.append((enzyme.name, pos, pos + enzyme.cut_offset - 1))
            expected.sort(key=lambda h: (h[1], h[0]))
            assert got == expected

    def test_default_set_is_palindromic(self):
        enzymes = default_enzymes()
        assert len(enzymes) == 10
        for enzyme in enzymes:
            assert enzyme.recognition_site == reverse_complement(enzyme.recognition_site)
