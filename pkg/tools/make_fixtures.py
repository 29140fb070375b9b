#!/usr/bin/env python3
"""Regenerate the fixture documents, corpora, and grammar cases.

Run from the repository root:

    python3 tools/make_fixtures.py

The script enforces the vocabulary discipline the bundled corpora rely on
(content words unique per anchor within a document, except declared shared
tokens), verifies every exact-phrase query reaches strict-hit F1 = 1.0 in
all four retrieval modes, and verifies the paraphrase corpus produces a
strictly better late_window_keyword score than keyword_only. Outputs are
deterministic; commit them.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from anchornav.engine import EngineConfig, NavEngine
from anchornav.evalharness import MODES, parse_case, run_eval
from anchornav.ingest import parse_layout
from anchornav.router import parse_grammar
from anchornav.tokenize import tokenize

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

FUNCTION_WORDS = {
    "the", "a", "an", "of", "in", "on", "at", "by", "to", "for", "and", "or",
    "was", "were", "is", "are", "be", "been", "from", "with", "under", "over",
    "before", "after", "near", "that", "this", "his", "her", "their", "its",
    "as", "during", "upon", "through", "against", "into", "until", "while",
    "had", "has", "have", "he", "she", "they", "it", "not", "no", "only",
    "shall", "till", "inside", "across", "between", "whenever", "any", "about",
    "via", "since", "each", "next", "another", "towards", "toward",
}

# ---------------------------------------------------------------------------
# Document authoring helpers
# ---------------------------------------------------------------------------


def _span(span_id, section_type, page, y0, content, table=None, x0=0.08, x1=0.92, h=0.055):
    span = {
        "span_id": span_id,
        "section_type": section_type,
        "page_number": page,
        "bbox_coords": {"x0": x0, "y0": round(y0, 4), "x1": x1, "y1": round(y0 + h, 4)},
        "content": content,
    }
    if table:
        span["table"] = table
    return span


def _flow_doc(doc_id, page_count, sections, paras_per_page=5):
    """sections: list of (heading, [para text...]); ordinals as given in text."""
    spans = []
    page, slot = 1, 0

    def place(kind, content):
        nonlocal page, slot
        if slot >= paras_per_page:
            page += 1
            slot = 0
        y0 = 0.06 + slot * 0.17
        spans.append(_span(f"{doc_id}-s{len(spans):03d}", kind, page, y0, content))
        slot += 1

    for heading, paras in sections:
        place("heading", heading)
        for text in paras:
            place("para", text)
    return {"doc_id": doc_id, "page_count": max(page_count, page), "spans": spans}


# ---------------------------------------------------------------------------
# doc_clean: born-digital case record
# ---------------------------------------------------------------------------

CLEAN_SECTIONS = [
    ("INTRODUCTION", [
        "1. The complaint originates from a roadside altercation near the Kaveri "
        "flyover junction. Constable Meena recorded the initial narration at dawn.",
        "2. Investigators photographed a damaged scooter and collected seventeen "
        "glass shards. Forensic tagging finished before the monsoon shower arrived.",
        "3. The prosecution relies upon vendor testimony describing a silver "
        "hatchback speeding away. Tyre impressions matched the suspect wheelbase "
        "precisely.",
        "4. A bail plea argued chronic ailment requiring dialysis thrice weekly. "
        "Surety bonds were furnished by cousins residing in Warangal.",
    ]),
    ("CHARGES", [
        "5. The charge alleges culpable homicide punishable under Section 302 read "
        "with abetment. The accused denied involvement at arraignment.",
        "6. A supplementary count cites destruction of material traces by burning a "
        "bloodstained kurta. Neighbours witnessed the bonfire on the terrace at "
        "midnight.",
        "7. Ballistic opinion confirms a pistol discharged twice at close range. "
        "Residue swabs tested positive for barium and antimony.",
        "8. The custody timeline was reconstructed through tower dumps locating the "
        "handset repeatedly. Call detail records placed the device near the scene.",
    ]),
    ("PRAYER", [
        "9. The petitioner prays for quashing of proceedings citing procedural "
        "lapses in sanction. Reliance rests on precedent rulings annexed in a "
        "compilation.",
        "10. The application seeks interim suspension of sentence pending appellate "
        "scrutiny. A medical board reassessment is sought fortnightly.",
        "11. The petition enumerates grounds challenging admissibility of "
        "electronic transcripts without certification. Chain of custody gaps were "
        "highlighted in a tabulated annexure.",
        "12. Costs are requested against the respondent department over dilatory "
        "obstructive conduct. The registry shall communicate operative directions "
        "expeditiously.",
        "13. Temporary custody of the almirah papers remains entrusted with the "
        "registrar till verification concludes across successive sittings whenever "
        "production summonses issue before vacation benches or specially convened "
        "registrarial hearings spanning consecutive forenoons. Sealed inventories "
        "countersigned jointly accompany the bundle.",
    ]),
    ("ENCLOSURES", [
        "14. Bank statements reveal five deposits aggregating rupees eighty lakh "
        "routed via Jaipur. Teller vouchers bear thumbprints awaiting examination.",
        "15. A panchayat elder narrates boundary feuds simmering since nineteen "
        "years. Revenue maps delineate encroachments shaded crimson.",
        "16. Hospital admission registers document contusions imaged during "
        "triage. Radiology plates disclose hairline fractures bilaterally.",
        "17. Insurance correspondence shows lapsed premiums reinstated "
        "retroactively after the mishap. Actuarial notes question backdated "
        "receipts.",
        "18. Handwriting examiners compared signatures across seven vakalatnamas. "
        "Slant, pressure, and loop formations diverged noticeably.",
        "19. Mobile forensics retrieved deleted chats referencing consignments "
        "and advance payments. Hash values authenticate the extraction report.",
        "20. Neighbourhood patrol logs list repeated complaints about loud "
        "quarrels. Entries coincide with dates mentioned by the informant.",
        "21. Prison warders describe peaceful behaviour and completion of "
        "literacy modules. Welfare officers endorse supervised release "
        "eligibility.",
    ]),
]

CLEAN_SHARED = {"custody": 3}  # paras 8, 11, 13

# ---------------------------------------------------------------------------
# doc_ocr: scanned variant with hyphenation breaks and per-section numbering
# ---------------------------------------------------------------------------

OCR_SECTIONS = [
    ("DEPOSITION", [
        "1.  The shop-\nkeeper described prolonged haggling before the incident. "
        "Her recollection stayed con-\nsistent throughout.",
        "2. The lorry cleaner admitted doz-\ning inside the cabin. He awoke only "
        "upon screeching brakes.",
        "3. A signal technician produced the maintenance logbook showing an amber "
        "lamp failure that evening. Notations carried initials of the duty fitter.",
        "4. The sweetmeat vendor counted his cash drawer twice.  A robbery claim "
        "was disputed as exaggeration.",
        "5. The beat officer sketched crowd positions with chalk. His diagram was "
        "tendered without objection.",
    ]),
    ("REBUTTAL", [
        "1. Defence confronted the witness with an earlier affidavit contradicting "
        "the timings materially. She attributed the variance to fright.",
        "2. Ledger entries appeared re-\nwritten in different ink. A chemist "
        "report corroborates the alteration.",
        "3. Photograph negatives were mis-\nplaced inside the malkhana custodian "
        "cabinet. His absence remained unexplained.",
        "4. A hostile declaration was recorded after the prosecutor sought "
        "permission to probe. Leading questions followed.",
        "5. The court noted nervous demeanour and lengthy pauses between answers. "
        "An adjournment request was declined.",
        # Shared-token paragraphs for the paraphrase corpus: "logbook" also
        # appears in DEPOSITION 3; this one is the mid-strength second gold,
        # the next one the weak filler.
        "6. A duplicate logbook kept at the divisional archive depot was "
        "summoned for counterfoil comparison.",
        "7. Registry clerks traced another logbook volume lying forgotten beneath "
        "superseded files, covers dusty, bindings loose, pagination erratic, "
        "jottings sparse, columns faded, spine cracked, corners chipped badly "
        "everywhere.",
    ]),
    ("EXHIBITS", [
        "1. Exhibit markings follow alphabetical series resumed midway causing "
        "confusion. Item labels mismatch the forwarding memo serials.",
        "2. A torn receipt mentions advance token money for machinery hire. "
        "Handwriting slants resemble the accountant samples.",
        "3. Weather bulletins archived for the fortnight indicate persistent "
        "drizzle. Visibility estimates undermine identification claims.",
        "4. The tailor recognised stitched monograms on the recovered waistcoat. "
        "Thread dye batches pointed toward a boutique supplier.",
        "5. Courier manifests disclose parcels booked using fictitious consignor "
        "names. Delivery runs clustered around festival holidays.",
        "6. A pawnshop register shows pledged bangles redeemed hurriedly next "
        "morning. The broker identified the redeemer hesitantly.",
        "7. Fuel station receipts stamp hours bracketing the alleged journey. "
        "Pump attendants remember an agitated customer.",
        "8. Cinema stubs found folded within the wallet suggest an alibi "
        "attempt. Seat allocations correspond with the balcony row.",
    ]),
]

OCR_SHARED = {"logbook": 3,
              # ordinals reset per section by design
              "1": 3, "2": 3, "3": 3, "4": 3, "5": 3, "6": 2, "7": 2}

# ---------------------------------------------------------------------------
# doc_tables: table-heavy variant; tables sit after the flow text
# ---------------------------------------------------------------------------

TABLE_PARAS = [
    "1. The panchnama catalogues articles recovered from the bungalow outhouse "
    "locker. Witnesses signed every sheet.",
    "2. Sealing wax impressions were verified in the magistrate presence with "
    "videography. Labels bore case numerals legibly.",
    "3. A valuation jeweller appraised the ornaments for carat purity with a "
    "certificate. Weighment occurred on calibrated scales.",
    "4. The godown inventory tallied against dispatch registers shows "
    "discrepancies flagged for audit. Shortfall quantities await reconciliation.",
    "5. Photographic plates depict arrangement prior to disturbance during "
    "transit. Forwarding dockets accompany each carton.",
    "6. Keys operating the almirah were produced voluntarily by the caretaker. "
    "Duplicates remained deposited with the society office.",
    "7. Liquid residues within amber bottles emitted a pungent kerosene odour. "
    "Chemical assay confirmed adulteration percentages.",
    "8. Currency wrappers displayed sequential numbering of a single treasury "
    "batch. Denomination bundles totalled fourteen lakh rupees.",
]

ACC_TABLE = [  # 2x2 crossing pages 2-3
    (0, 0, 2, "Rakesh Kumar Bhandari"),
    (0, 1, 2, "Getaway autorickshaw driver"),
    (1, 0, 3, "Salim Ahmed Qureshi"),
    (1, 1, 3, "Corner street lookout"),
]

SEIZ_TABLE = [  # 3x3 on page 3; header row cells stay unqueried
    (0, 0, "Artefact"), (0, 1, "Tally"), (0, 2, "State"),
    (1, 0, "Brass padlock pair untagged"), (1, 1, "Three pieces counted manually"),
    (1, 2, "Corroded badly rusted finish"),
    (2, 0, "Nylon rope coil bundled"), (2, 1, "Nine metres length measured"),
    (2, 2, "Frayed ends visible clearly"),
]


def build_doc_tables():
    doc_id = "doc_tables"
    spans = []
    spans.append(_span(f"{doc_id}-s000", "heading", 1, 0.05, "SEIZURE MEMO"))
    for i, text in enumerate(TABLE_PARAS):
        page = 1 if i < 4 else 2
        y0 = 0.14 + i * 0.18 if page == 1 else 0.06 + (i - 4) * 0.12
        spans.append(_span(f"{doc_id}-s{i + 1:03d}", "para", page, y0, text))
    for row, col, page, content in ACC_TABLE:
        y0 = 0.62 + row * 0.08 if page == 2 else 0.06 + row * 0.08
        spans.append(_span(f"{doc_id}-acc-{row}{col}", "table_cell", page, y0, content,
                           table={"table_id": "t-acc", "row": row, "col": col},
                           x0=0.1 + col * 0.42, x1=0.48 + col * 0.42, h=0.05))
    for row, col, content in SEIZ_TABLE:
        spans.append(_span(f"{doc_id}-seiz-{row}{col}", "table_cell", 3,
                           0.4 + row * 0.08, content,
                           table={"table_id": "t-seiz", "row": row, "col": col},
                           x0=0.08 + col * 0.3, x1=0.34 + col * 0.3, h=0.05))
    return {"doc_id": doc_id, "page_count": 3, "spans": spans}


# ---------------------------------------------------------------------------
# Vocabulary discipline
# ---------------------------------------------------------------------------


def check_vocabulary(payload, shared_budget):
    """Content words must appear in exactly one anchor, minus declared shares."""
    record = parse_layout(payload)
    owners: dict[str, set[str]] = {}
    for anchor in record.anchors:
        for token in set(tokenize(record.text_of(anchor), citation_bigrams=False)):
            if token in FUNCTION_WORDS:
                continue
            owners.setdefault(token, set()).add(anchor.anchor_id)
    problems = []
    for token, anchor_ids in sorted(owners.items()):
        allowed = shared_budget.get(token, 1)
        if len(anchor_ids) > allowed:
            problems.append(f"{payload['doc_id']}: token {token!r} appears in "
                            f"{len(anchor_ids)} anchors (allowed {allowed}): "
                            f"{sorted(anchor_ids)}")
    if problems:
        raise SystemExit("vocabulary discipline violated:\n" + "\n".join(problems))
    return record


# ---------------------------------------------------------------------------
# Corpus construction
# ---------------------------------------------------------------------------

# Contextual queries are contiguous verbatim runs chosen to be content-word
# heavy: function words inside a query act as low-idf chaff that pulls
# unrelated anchors over the highlight threshold in the dense-only ablation.
CLEAN_PHRASES = {
    "doc_clean-s001": ["Kaveri flyover junction", "Constable Meena recorded"],
    "doc_clean-s002": ["seventeen glass shards", "Forensic tagging finished"],
    "doc_clean-s003": ["silver hatchback speeding", "Tyre impressions matched"],
    "doc_clean-s004": ["chronic ailment requiring dialysis thrice"],
    "doc_clean-s006": ["culpable homicide punishable", "accused denied involvement"],
    "doc_clean-s007": ["supplementary count cites destruction"],
    "doc_clean-s008": ["Ballistic opinion confirms", "Residue swabs tested positive"],
    "doc_clean-s009": ["tower dumps locating", "Call detail records placed"],
    "doc_clean-s011": ["citing procedural lapses", "precedent rulings annexed"],
    "doc_clean-s012": ["pending appellate scrutiny", "medical board reassessment"],
    "doc_clean-s013": ["enumerates grounds challenging admissibility",
                       "transcripts without certification"],
    "doc_clean-s014": ["dilatory obstructive conduct",
                       "communicate operative directions expeditiously"],
    "doc_clean-s015": ["verification concludes across successive sittings",
                       "Sealed inventories countersigned jointly"],
    "doc_clean-s017": ["deposits aggregating rupees eighty lakh"],
    "doc_clean-s018": ["panchayat elder narrates boundary feuds"],
    "doc_clean-s019": ["Radiology plates disclose hairline fractures"],
    "doc_clean-s020": ["lapsed premiums reinstated retroactively"],
    "doc_clean-s021": ["Handwriting examiners compared signatures"],
    "doc_clean-s022": ["Hash values authenticate"],
    "doc_clean-s023": ["patrol logs list repeated complaints"],
    "doc_clean-s024": ["Welfare officers endorse supervised release"],
}

OCR_PHRASES = {
    "doc_ocr-s001": ["shopkeeper described prolonged haggling"],
    "doc_ocr-s002": ["lorry cleaner admitted dozing"],
    "doc_ocr-s003": ["signal technician produced", "Notations carried initials"],
    "doc_ocr-s004": ["sweetmeat vendor counted"],
    "doc_ocr-s005": ["sketched crowd positions", "tendered without objection"],
    "doc_ocr-s007": ["earlier affidavit contradicting"],
    "doc_ocr-s008": ["chemist report corroborates"],
    "doc_ocr-s009": ["malkhana custodian cabinet", "absence remained unexplained"],
    "doc_ocr-s010": ["prosecutor sought permission", "Leading questions followed"],
    "doc_ocr-s011": ["noted nervous demeanour"],
    "doc_ocr-s012": ["divisional archive depot"],
    "doc_ocr-s015": ["forwarding memo serials"],
    "doc_ocr-s016": ["advance token money"],
    "doc_ocr-s017": ["Visibility estimates undermine identification"],
    "doc_ocr-s018": ["recognised stitched monograms"],
    "doc_ocr-s019": ["Courier manifests disclose parcels"],
    "doc_ocr-s020": ["pledged bangles redeemed hurriedly"],
    "doc_ocr-s021": ["Pump attendants remember"],
    "doc_ocr-s022": ["Seat allocations correspond"],
}

TABLE_PHRASES = {
    "doc_tables-s001": ["panchnama catalogues articles recovered"],
    "doc_tables-s002": ["Sealing wax impressions", "Labels bore case numerals legibly"],
    "doc_tables-s003": ["valuation jeweller appraised"],
    "doc_tables-s004": ["Shortfall quantities await reconciliation"],
    "doc_tables-s005": ["Photographic plates depict arrangement"],
    "doc_tables-s006": ["Duplicates remained deposited"],
    "doc_tables-s007": ["pungent kerosene odour"],
    "doc_tables-s008": ["Denomination bundles totalled fourteen lakh"],
    "doc_tables-acc-00": ["Rakesh Kumar Bhandari"],
    "doc_tables-acc-01": ["Getaway autorickshaw driver"],
    "doc_tables-acc-10": ["Salim Ahmed Qureshi"],
    "doc_tables-acc-11": ["Corner street lookout"],
    "doc_tables-seiz-10": ["Brass padlock pair untagged"],
    "doc_tables-seiz-11": ["Three pieces counted manually"],
    "doc_tables-seiz-12": ["Corroded badly rusted finish"],
    "doc_tables-seiz-20": ["Nylon rope coil bundled"],
    "doc_tables-seiz-21": ["Nine metres length measured"],
    "doc_tables-seiz-22": ["Frayed ends visible clearly"],
}


def anchor_by_span(record, span_id):
    for a in record.anchors:
        if a.span_id == span_id:
            return a
    raise KeyError(span_id)


def exact_cases(records):
    """Verbatim-phrase contextual queries, temporal jumps, synopsis queries."""
    cases = []
    counter = iter(range(1, 1000))

    def add(doc_id, family, utterance, gold):
        cases.append({"query_id": f"ex{next(counter):03d}", "doc_id": doc_id,
                      "family": family, "utterance": utterance,
                      "gold_anchor_ids": sorted(gold)})

    for doc_id, phrase_map in (("doc_clean", CLEAN_PHRASES),
                               ("doc_ocr", OCR_PHRASES),
                               ("doc_tables", TABLE_PHRASES)):
        record = records[doc_id]
        for span_id, plist in phrase_map.items():
            anchor = anchor_by_span(record, span_id)
            text = record.text_of(anchor)
            for i, phrase in enumerate(plist):
                assert phrase in text, f"{span_id}: not verbatim: {phrase!r}"
                utterance = f"highlight {phrase}" if i % 2 == 0 else phrase
                add(doc_id, "contextual", utterance, [anchor.anchor_id])

    clean = records["doc_clean"]
    for n in (2, 5, 9, 12):
        gold = next(a for a in clean.anchors if a.ordinal == n and a.type == "para")
        word = {2: "two", 5: "five", 9: "nine", 12: "twelve"}[n]
        utterance = f"go to paragraph {n}" if n % 2 == 0 else f"go to paragraph {word}"
        add("doc_clean", "temporal", utterance, [gold.anchor_id])

    ocr = records["doc_ocr"]
    # Per-section numbering resets: the global ordinal lookup targets the
    # first occurrence in reading order (DEPOSITION section).
    for n in (3, 4):
        gold = next(a for a in ocr.anchors if a.ordinal == n and a.type == "para")
        add("doc_ocr", "temporal", f"go to paragraph {n}", [gold.anchor_id])

    tables = records["doc_tables"]
    # Table-region commands resolve cells directly via (table_id, row, col).
    for row, col, _page, _content in ACC_TABLE[:2]:
        anchor = anchor_by_span(tables, f"doc_tables-acc-{row}{col}")
        add("doc_tables", "contextual", f"table t-acc row {row} column {col}",
            [anchor.anchor_id])
    for row, col, _content in (SEIZ_TABLE[3], SEIZ_TABLE[8]):
        anchor = anchor_by_span(tables, f"doc_tables-seiz-{row}{col}")
        add("doc_tables", "contextual", f"table t-seiz row {row} column {col}",
            [anchor.anchor_id])
    for n in (1, 4):
        gold = next(a for a in tables.anchors if a.ordinal == n and a.type == "para")
        add("doc_tables", "temporal", f"go to paragraph {n}", [gold.anchor_id])

    # Summarization: gold = the anchors the deterministic synopsis cites.
    engine = NavEngine(EngineConfig(use_dense=False))
    for payload in PAYLOADS.values():
        engine.ingest(payload)
    for doc_id, scope in (("doc_clean", "charges"), ("doc_clean", "document"),
                          ("doc_ocr", "document")):
        synopsis = engine.get(doc_id).synopses[scope]
        add(doc_id, "summarization", f"summarize the {scope}",
            synopsis.cited_anchor_ids())
    return cases


def paraphrase_cases(records):
    """Morphology-only and shared-token queries for the ablation ordering."""
    cases = []
    counter = iter(range(1, 1000))

    def add(doc_id, utterance, gold_span_ids):
        record = records[doc_id]
        gold = [anchor_by_span(record, sid).anchor_id for sid in gold_span_ids]
        cases.append({"query_id": f"pp{next(counter):03d}", "doc_id": doc_id,
                      "family": "contextual", "utterance": utterance,
                      "gold_anchor_ids": sorted(gold)})

    # Pure morphology: no content token shared with the gold anchor; 3-gram
    # overlap only. keyword_only has nothing to hold on to.
    add("doc_clean", "altercations flyovers junctions",
        ["doc_clean-s001"])
    add("doc_clean", "photographing dented scooters", ["doc_clean-s002"])
    add("doc_clean", "racing hatchbacks matching tyres impression",
        ["doc_clean-s003"])
    add("doc_clean", "dialysed ailments bonded sureties", ["doc_clean-s004"])
    add("doc_clean", "burnt kurtas bonfires witnessing neighbour",
        ["doc_clean-s007"])
    add("doc_clean", "discharging pistols residues swab", ["doc_clean-s008"])
    add("doc_clean", "quashed proceeding lapsed sanctions", ["doc_clean-s011"])
    add("doc_clean", "suspending sentences appeal scrutinies",
        ["doc_clean-s012"])
    add("doc_ocr", "shopkeepers haggled consistency", ["doc_ocr-s001"])
    add("doc_ocr", "screeched braking woke dozed cleaners", ["doc_ocr-s002"])
    add("doc_ocr", "counting cashes drawers vendors", ["doc_ocr-s004"])
    add("doc_ocr", "contradictory affidavits concerning timing", ["doc_ocr-s007"])
    add("doc_ocr", "misplacing negative photographs custodians", ["doc_ocr-s009"])
    add("doc_ocr", "adjourned requests demeanours noting", ["doc_ocr-s011"])

    # Shared-token pairs: one mid-idf token ("custody"/"logbook") is lexically
    # visible on the second gold anchor, below the abstain threshold for
    # keyword_only but lifted over it by the window-dense leg.
    add("doc_clean",
        "custody tower dumps tabulation gap annexures",
        ["doc_clean-s009", "doc_clean-s013"])
    add("doc_ocr",
        "logbook amber failures duplicated counterfoils comparisons",
        ["doc_ocr-s003", "doc_ocr-s012"])
    return cases


GRAMMAR_CASES = [
    ("go to paragraph 23", "temporal", {"paragraph": 23}),
    ("go to paragraph twenty three", "temporal", {"paragraph": 23}),
    ("go to paragraph twenty-three", "temporal", {"paragraph": 23}),
    ("Go To Paragraph 7", "temporal", {"paragraph": 7}),
    ("go to para 9", "temporal", {"paragraph": 9}),
    ("go to para ninety nine", "temporal", {"paragraph": 99}),
    ("go to page 12", "temporal", {"page": 12}),
    ("go to page twelve", "temporal", {"page": 12}),
    ("go to page 1", "temporal", {"page": 1}),
    ("GO TO PAGE 350", "temporal", {"page": 350}),
    ("para 7", "temporal", {"paragraph": 7}),
    ("para seventeen", "temporal", {"paragraph": 17}),
    ("paragraph 14", "temporal", {"paragraph": 14}),
    ("paragraph forty two", "temporal", {"paragraph": 42}),
    ("page 2", "temporal", {"page": 2}),
    ("page eleven", "temporal", {"page": 11}),
    ("go to paragraph 23.", "temporal", {"paragraph": 23}),
    ("  go to paragraph 8  ", "temporal", {"paragraph": 8}),
    ("open 1", "temporal", {"relative": "open_n", "index": 1}),
    ("open 2", "temporal", {"relative": "open_n", "index": 2}),
    ("open two", "temporal", {"relative": "open_n", "index": 2}),
    ("open 5", "temporal", {"relative": "open_n", "index": 5}),
    ("Open Three", "temporal", {"relative": "open_n", "index": 3}),
    ("next hit", "temporal", {"relative": "next_hit"}),
    ("Next Hit", "temporal", {"relative": "next_hit"}),
    ("NEXT HIT", "temporal", {"relative": "next_hit"}),
    ("next  hit", "temporal", {"relative": "next_hit"}),
    ("previous hit", "temporal", {"relative": "prev_hit"}),
    ("Previous Hit", "temporal", {"relative": "prev_hit"}),
    ("previous section", "temporal", {"relative": "prev_section"}),
    ("Previous Section", "temporal", {"relative": "prev_section"}),
    ("toggle highlights", "viewer_control", {"action": "toggle_highlights"}),
    ("Toggle Highlights", "viewer_control", {"action": "toggle_highlights"}),
    ("back", "viewer_control", {"action": "back"}),
    ("Back", "viewer_control", {"action": "back"}),
    ("back.", "viewer_control", {"action": "back"}),
    ("highlight the seizure memo", "contextual",
     {"query_text": "the seizure memo", "filters": {}}),
    ("highlight call detail records", "contextual",
     {"query_text": "call detail records", "filters": {}}),
    ("Highlight residue swabs", "contextual",
     {"query_text": "residue swabs", "filters": {}}),
    ("highlight brass padlock", "contextual",
     {"query_text": "brass padlock", "filters": {}}),
    ("summarize the charges", "summarization", {"scope": "charges"}),
    ("summarise the charges", "summarization", {"scope": "charges"}),
    ("summarize the petition", "summarization", {"scope": "petition"}),
    ("summarise the petition", "summarization", {"scope": "petition"}),
    ("summarize the document", "summarization", {"scope": "document"}),
    ("summarise the document", "summarization", {"scope": "document"}),
    ("Summarize The Charges", "summarization", {"scope": "charges"}),
    ("table t-acc row 0 column 1", "contextual",
     {"query_text": "table t-acc row 0 column 1",
      "filters": {"table_region": {"table_id": "t-acc", "row": 0, "col": 1}}}),
    ("table t-seiz row 2 column 2", "contextual",
     {"query_text": "table t-seiz row 2 column 2",
      "filters": {"table_region": {"table_id": "t-seiz", "row": 2, "col": 2}}}),
    ("table annex1 row 10 column 3", "contextual",
     {"query_text": "table annex1 row 10 column 3",
      "filters": {"table_region": {"table_id": "annex1", "row": 10, "col": 3}}}),
    ("go to paragraph thirty one", "temporal", {"paragraph": 31}),
    ("go to paragraph fifty", "temporal", {"paragraph": 50}),
    ("open 9", "temporal", {"relative": "open_n", "index": 9}),
    ("page 48", "temporal", {"page": 48}),
]


def verify_grammar():
    failures = []
    for utterance, kind, slots in GRAMMAR_CASES:
        intent = parse_grammar(utterance)
        if intent is None or intent.kind != kind or dict(intent.slots) != slots:
            failures.append(f"{utterance!r}: got {intent}")
    if failures:
        raise SystemExit("grammar fixture mismatches:\n" + "\n".join(failures))
    print(f"grammar cases verified: {len(GRAMMAR_CASES)}")


def verify_exact(cases):
    report = run_eval([parse_case(c) for c in cases], PAYLOADS, modes=MODES)
    bad = []
    for mode, metrics in report.modes.items():
        print(f"exact corpus {mode:<22} F1={metrics.strict_f1:.4f} "
              f"P={metrics.precision:.4f} R={metrics.recall:.4f}")
        if metrics.strict_f1 != 1.0:
            bad.append(mode)
    if bad:
        for qid, per_mode in report.per_query.items():
            if any(v != 1.0 for v in per_mode.values()):
                case = next(c for c in cases if c["query_id"] == qid)
                print(f"  FAIL {qid} {case['utterance']!r}: {per_mode}")
        raise SystemExit(f"exact corpus not perfect in modes: {bad}")


def verify_paraphrase(cases):
    report = run_eval([parse_case(c) for c in cases], PAYLOADS,
                      modes=("keyword_only", "late_window_keyword"))
    kw = report.modes["keyword_only"].strict_f1
    lw = report.modes["late_window_keyword"].strict_f1
    print(f"paraphrase corpus keyword_only={kw:.4f} late_window_keyword={lw:.4f}")
    for qid, per_mode in sorted(report.per_query.items()):
        case = next(c for c in cases if c["query_id"] == qid)
        print(f"  {qid} kw={per_mode['keyword_only']:.3f} "
              f"lw={per_mode['late_window_keyword']:.3f}  {case['utterance']!r}")
    if not kw < lw:
        raise SystemExit("paraphrase ordering violated: keyword_only >= late_window")


def main():
    global PAYLOADS
    FIXTURES.mkdir(exist_ok=True)

    clean_payload = _flow_doc("doc_clean", 3, CLEAN_SECTIONS)
    ocr_payload = _flow_doc("doc_ocr", 3, OCR_SECTIONS)
    tables_payload = build_doc_tables()
    PAYLOADS = {"doc_clean": clean_payload, "doc_ocr": ocr_payload,
                "doc_tables": tables_payload}

    records = {}
    records["doc_clean"] = check_vocabulary(clean_payload, CLEAN_SHARED)
    records["doc_ocr"] = check_vocabulary(ocr_payload, OCR_SHARED)
    records["doc_tables"] = check_vocabulary(tables_payload, {})
    print("vocabulary discipline ok")

    verify_grammar()

    exact = exact_cases(records)
    print(f"exact corpus queries: {len(exact)}")
    assert len(exact) >= 60, f"need >= 60 exact queries, have {len(exact)}"
    verify_exact(exact)

    paraphrase = paraphrase_cases(records)
    verify_paraphrase(paraphrase)

    for name, payload in PAYLOADS.items():
        (FIXTURES / f"{name}.json").write_text(
            json.dumps(payload, indent=2), encoding="utf-8")
    with open(FIXTURES / "corpus_exact.jsonl", "w", encoding="utf-8") as fh:
        for case in exact:
            fh.write(json.dumps(case) + "\n")
    with open(FIXTURES / "corpus_paraphrase.jsonl", "w", encoding="utf-8") as fh:
        for case in paraphrase:
            fh.write(json.dumps(case) + "\n")
    with open(FIXTURES / "grammar_cases.jsonl", "w", encoding="utf-8") as fh:
        for utterance, kind, slots in GRAMMAR_CASES:
            fh.write(json.dumps({"utterance": utterance, "kind": kind,
                                 "slots": slots}) + "\n")
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
