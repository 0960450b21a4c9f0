import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from speechscore.errors import FormatError, OverlapError
from speechscore.formats import (
    RttmTurn,
    SadKind,
    SadRecord,
    Sentiment,
    TranscriptUtterance,
    parse_description,
    parse_rttm,
    parse_sad,
    parse_sid_key,
    parse_sid_output,
    parse_transcript,
    parse_uem,
    ref_label_from_filename,
    serialize,
    serialize_description,
)
from speechscore.formats.sad import REFERENCE, SYSTEM, serialize_sad
from speechscore.formats.sid import EVAL

RTTM_LINES = (
    "SPEAKER FS_P01_dev_001 1 256.04 2.35 <NA> <NA> EECOM1 <NA>\n"
    "SPEAKER FS_P01_dev_001 1 368.97 2.22 <NA> <NA> GNC1 <NA>\n"
)
UEM_LINES = "FS_P01_dev_001 1 234.32 737.54\nFS_P01_eval_007 1 124.46 624.23\n"
TRANSCRIPT_DOC = """[
 {"speakerID": "NEIL", "words": "It's one small step for man,", "sentiment": "POSITIVE",
  "startTIme": "1325.203", "endTime": "1327.501"},
 {"speakerID": "NEIL", "words": "one giant leap for mankind.", "sentiment": "POSITIVE",
  "startTIme": "1330.162", "endTime": "1332.89"}
]"""
SAD_OVERLAP = (
    "X\tX\tX\tSAD\tX\t0.00\t5.77\tspeech\t0.500000\n"
    "X\tX\tX\tSAD\tX\t5.13\t6.37\tspeech\t0.500000\n"
)


class TestRttm:
    def test_example_lines(self):
        first, second = parse_rttm(RTTM_LINES)
        assert (first.file_id, first.onset, first.dur, first.speaker_name) == ("FS_P01_dev_001", 256040, 2350, "EECOM1")
        assert first.offset == 258390
        assert (second.speaker_name, second.onset, second.dur) == ("GNC1", 368970, 2220)

    def test_round_trip_is_byte_identical(self):
        assert serialize(parse_rttm(RTTM_LINES)) == RTTM_LINES

    def test_eight_fields_accepted(self):
        (turn,) = parse_rttm("SPEAKER f 1 0 1 <NA> <NA> A\n")
        assert turn.speaker_name == "A"

    @pytest.mark.parametrize("line, field", [
        ("TALKER f 1 0 1 <NA> <NA> A <NA>", "type"),
        ("SPEAKER f 2 0 1 <NA> <NA> A <NA>", "channel"),
        ("SPEAKER f 1 zero 1 <NA> <NA> A <NA>", "onset"),
        ("SPEAKER f 1 0 -1 <NA> <NA> A <NA>", "dur"),
        ("SPEAKER f 1 0 1 <NA> <NA>", None),
    ])
    def test_errors_carry_provenance(self, line, field):
        with pytest.raises(FormatError) as err:
            parse_rttm("SPEAKER f 1 0 1 <NA> <NA> A <NA>\n" + line + "\n", source="x.rttm")
        assert err.value.line == 2
        assert err.value.source == "x.rttm"
        if field:
            assert field in (err.value.field or "")

    def test_unk_reserved_in_system_output(self):
        line = "SPEAKER f 1 0 1 <NA> <NA> UNK <NA>\n"
        assert parse_rttm(line)[0].speaker_name == "UNK"
        with pytest.raises(FormatError, match="UNK"):
            parse_rttm(line, system=True)

    def test_file_id_mismatch_drops_turn(self):
        warnings = []
        turns = parse_rttm(RTTM_LINES + "SPEAKER other 1 0 1 <NA> <NA> A <NA>\n",
                           expected_file_id="FS_P01_dev_001", warnings=warnings)
        assert len(turns) == 2
        assert len(warnings) == 1

    def test_crlf_and_bom(self):
        text = ("\ufeff" + RTTM_LINES.replace("\n", "\r\n")).encode("utf-8")
        assert len(parse_rttm(text)) == 2


class TestUem:
    def test_example_lines(self):
        a, b = parse_uem(UEM_LINES)
        assert (a.file_id, a.channel_id, a.onset, a.offset) == ("FS_P01_dev_001", 1, 234320, 737540)
        assert (b.file_id, b.onset, b.offset) == ("FS_P01_eval_007", 124460, 624230)

    def test_round_trip(self):
        assert serialize(parse_uem(UEM_LINES)) == UEM_LINES

    def test_reversed_region(self):
        with pytest.raises(FormatError, match="line 1|reversed|before"):
            parse_uem("f 1 10.0 9.0\n")

    def test_overlap_names_both_lines(self):
        with pytest.raises(OverlapError) as err:
            parse_uem("f 1 0 10\ng 1 0 10\nf 1 5 20\n")
        assert err.value.line == 3
        assert err.value.other_line == 1


class TestSad:
    def test_example_line(self):
        (rec,) = parse_sad("X\tX\tX\tSAD\tX\t0.00\t5.77\tspeech\t0.500000\n")
        assert (rec.start, rec.end, rec.kind, rec.confidence) == (0, 5770, SadKind.SPEECH, 0.5)

    def test_optional_confidence(self):
        (rec,) = parse_sad("X\tX\tX\tSAD\tX\t6.37\t11.22\tspeech\n")
        assert rec.confidence is None
        assert (rec.start, rec.end) == (6370, 11220)

    def test_overlap_example_rejected(self):
        with pytest.raises(OverlapError) as err:
            parse_sad(SAD_OVERLAP, source="sys.txt")
        msg = str(err.value)
        assert "5.77" in msg and "5.13" in msg
        assert {err.value.line, err.value.other_line} == {1, 2}

    def test_reference_vocabulary(self):
        recs = parse_sad("X\tX\tX\tSAD\tf\t0\t1\tS\nX\tX\tX\tSAD\tf\t1\t2\tNS\n", REFERENCE)
        assert [r.kind for r in recs] == [SadKind.SPEECH, SadKind.NON_SPEECH]
        with pytest.raises(FormatError):
            parse_sad("X\tX\tX\tSAD\tf\t0\t1\tS\n", SYSTEM)

    @pytest.mark.parametrize("line", [
        "X\tX\tX\tSAD\tX\t0\t1\tspeech\t1.5",
        "X\tX\tX\tSAD\tX\t0\t1\tnoise\t0.5",
        "X\tX\tX\tSID\tX\t0\t1\tspeech\t0.5",
        "X\tX\tX\tSAD\tX\t2\t1\tspeech\t0.5",
    ])
    def test_invalid_records(self, line):
        with pytest.raises(FormatError):
            parse_sad(line + "\n")

    def test_space_delimited_warns(self):
        warnings = []
        (rec,) = parse_sad("X X X SAD X 0.00 5.77 speech 0.500000\n", warnings=warnings)
        assert rec.end == 5770
        assert warnings

    @given(st.lists(st.tuples(st.integers(0, 50), st.integers(1, 50), st.booleans(),
                              st.one_of(st.none(), st.integers(0, 10**6))), max_size=15))
    def test_round_trip(self, spec):
        records, t = [], 0
        for gap, length, speech, conf in spec:
            start = t + gap
            kind = SadKind.SPEECH if speech else SadKind.NON_SPEECH
            records.append(SadRecord("F", start, start + length, kind,
                                     None if conf is None else conf / 10**6))
            t = start + length
        assert parse_sad(serialize_sad(records)) == records
        text = serialize_sad(records)
        assert serialize_sad(parse_sad(text)) == text


class TestSid:
    def test_example_lines(self):
        a, b = parse_sid_output("FS_P01_dev_FD1_001 FD1 GNC1 INCO NEIL BUZZ\n"
                                "FS_P01_eval_005 FIDO GNC1 GUIDANCE NEIL BUZZ\n")
        assert a.segment_id == "FS_P01_dev_FD1_001"
        assert a.predictions == ("FD1", "GNC1", "INCO", "NEIL", "BUZZ")
        assert b.predictions[0] == "FIDO"

    def test_round_trip(self):
        text = "FS_P01_dev_FD1_001 FD1 GNC1 INCO NEIL BUZZ\n"
        assert serialize(parse_sid_output(text)) == text

    @pytest.mark.parametrize("text", ["seg A B C D\n", "seg A B C D E F\n", "seg A B A D E\n",
                                      "seg A B C D E\nseg A B C D E\n"])
    def test_rejected(self, text):
        with pytest.raises(FormatError):
            parse_sid_output(text)

    def test_key(self):
        assert parse_sid_key("FS_P01_eval_005 FIDO\n") == {"FS_P01_eval_005": "FIDO"}

    def test_labels_from_names(self):
        assert ref_label_from_filename("FS_P01_dev_FD1_001") == "FD1"
        assert ref_label_from_filename("FS_P01_eval_005", EVAL) is None
        with pytest.raises(FormatError):
            ref_label_from_filename("random.wav")


class TestTranscript:
    def test_example(self):
        first, second = parse_transcript(TRANSCRIPT_DOC)
        assert first == TranscriptUtterance("NEIL", "It's one small step for man,", Sentiment.POSITIVE,
                                            1325203, 1327501)
        assert second.end == 1332890

    def test_serializer_uses_canonical_key(self):
        utts = parse_transcript(TRANSCRIPT_DOC)
        text = serialize(utts)
        assert "startTIme" not in text and '"startTime": "1325.203"' in text
        assert parse_transcript(text) == utts

    def test_single_object(self):
        doc = json.loads(TRANSCRIPT_DOC)[0]
        assert len(parse_transcript(json.dumps(doc))) == 1

    @pytest.mark.parametrize("patch", [
        {"sentiment": "HAPPY"}, {"endTime": "soon"}, {"speakerID": None}, {"endTime": "1.0"},
    ])
    def test_rejected(self, patch):
        doc = dict(json.loads(TRANSCRIPT_DOC)[0], **patch)
        doc = {k: v for k, v in doc.items() if v is not None}
        with pytest.raises(FormatError):
            parse_transcript(json.dumps([doc]))

    def test_sentiment_optional_for_asr(self):
        doc = {k: v for k, v in json.loads(TRANSCRIPT_DOC)[0].items() if k != "sentiment"}
        (u,) = parse_transcript(json.dumps([doc]), require_sentiment=False)
        assert u.sentiment is None
        with pytest.raises(FormatError):
            parse_transcript(json.dumps([doc]))


DESCRIPTION = {
    "task": "SD", "abstract": "a", "data_resources": "b", "algorithm": "c",
    "hardware": {"cpu_cores": 8, "cpu_model": "x", "gpu_count": 1, "gpu_model": "y", "ram": "32 GB",
                 "disk": "10 GB", "frameworks": "torch", "runtime_per_30min_file": "40 s"},
}


class TestDescription:
    def test_round_trip(self):
        desc = parse_description(json.dumps(DESCRIPTION))
        assert desc.hardware.cpu_cores == 8
        assert parse_description(serialize_description(desc)) == desc

    def test_missing_hardware_named(self):
        doc = {k: v for k, v in DESCRIPTION.items() if k != "hardware"}
        with pytest.raises(FormatError, match="Hardware requirements"):
            parse_description(json.dumps(doc))

    def test_missing_runtime_field(self):
        doc = json.loads(json.dumps(DESCRIPTION))
        del doc["hardware"]["runtime_per_30min_file"]
        with pytest.raises(FormatError, match="30 minute"):
            parse_description(json.dumps(doc))

    def test_unknown_task(self):
        with pytest.raises(FormatError, match="Task"):
            parse_description(json.dumps(dict(DESCRIPTION, task="KWS")))


def test_rttm_turn_defaults_serialize():
    assert serialize([RttmTurn("f", 1500, 250, "A")]) == "SPEAKER f 1 1.5 0.25 <NA> <NA> A <NA>\n"
