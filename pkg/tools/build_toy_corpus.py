#!/usr/bin/env python3
"""Regenerate the hand-annotated toy corpus under data/toy/.

Parses are written by hand in a compact one-token-per-line notation
(surface lemma upos xpos head deprel) and expanded to CoNLL-U. Embeddings
are unit basis vectors per concept, with a few deliberately similar pairs:

    camcorder ~ camera   0.72   (clusters at the 0.6 threshold)
    wireless  ~ wifi     0.72   (clusters at the 0.6 threshold)
    tablet    ~ ipad     0.85   (matches at the 0.8 threshold)

Product contexts carry their parses in the sidecar contexts.conllu file;
dialog contexts carry them inline. Run from the repository root:

    python tools/build_toy_corpus.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "toy"


def sent(text: str, spec: str) -> dict:
    """Compact hand annotation -> {text, conllu} record."""
    lines = [f"# text = {text}"]
    for i, row in enumerate(s for s in spec.strip().splitlines() if s.strip()):
        surface, lemma, upos, xpos, head, deprel = row.split()
        lines.append(f"{i + 1}\t{surface}\t{lemma}\t{upos}\t{xpos}\t_\t{head}\t{deprel}\t_\t_")
    return {"text": text, "conllu": "\n".join(lines)}


# --- community-QA products -------------------------------------------------

CAM1 = {
    "id": "cam1",
    "scenario": "communityQA",
    "split": "test",
    "class_hint": ["Camera & Photo"],
    "blocks": [
        ("title", sent("Sony camcorder with digital zoom", """
            Sony sony PROPN NNP 2 compound
            camcorder camcorder NOUN NN 0 root
            with with ADP IN 5 case
            digital digital ADJ JJ 5 amod
            zoom zoom NOUN NN 2 nmod
        """)),
        ("description", [
            sent("The camcorder has digital zoom and image stabilization.", """
                The the DET DT 2 det
                camcorder camcorder NOUN NN 3 nsubj
                has have VERB VBZ 0 root
                digital digital ADJ JJ 5 amod
                zoom zoom NOUN NN 3 obj
                and and CCONJ CC 8 cc
                image image NOUN NN 8 compound
                stabilization stabilization NOUN NN 5 conj
                . . PUNCT . 3 punct
            """),
            sent("It records video in low light.", """
                It it PRON PRP 2 nsubj
                records record VERB VBZ 0 root
                video video NOUN NN 2 obj
                in in ADP IN 6 case
                low low ADJ JJ 6 amod
                light light NOUN NN 2 obl
                . . PUNCT . 2 punct
            """),
        ]),
    ],
    "target": sent("Does the camcorder have optical zoom?", """
        Does do AUX VBZ 4 aux
        the the DET DT 3 det
        camcorder camcorder NOUN NN 4 nsubj
        have have VERB VB 0 root
        optical optical ADJ JJ 6 amod
        zoom zoom NOUN NN 4 obj
        ? ? PUNCT . 4 punct
    """),
}

CAM2 = {
    "id": "cam2",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Camera & Photo"],
    "blocks": [
        ("title", sent("Nikon camera with optical zoom", """
            Nikon nikon PROPN NNP 2 compound
            camera camera NOUN NN 0 root
            with with ADP IN 5 case
            optical optical ADJ JJ 5 amod
            zoom zoom NOUN NN 2 nmod
        """)),
        ("description", [
            sent("The camera has a wide lens.", """
                The the DET DT 2 det
                camera camera NOUN NN 3 nsubj
                has have VERB VBZ 0 root
                a a DET DT 6 det
                wide wide ADJ JJ 6 amod
                lens lens NOUN NN 3 obj
                . . PUNCT . 3 punct
            """),
            sent("The battery lasts ten hours.", """
                The the DET DT 2 det
                battery battery NOUN NN 3 nsubj
                lasts last VERB VBZ 0 root
                ten ten NUM CD 5 nummod
                hours hour NOUN NNS 3 obl
                . . PUNCT . 3 punct
            """),
        ]),
        ("question", sent("Does the camera come with a battery charger?", """
            Does do AUX VBZ 4 aux
            the the DET DT 3 det
            camera camera NOUN NN 4 nsubj
            come come VERB VB 0 root
            with with ADP IN 8 case
            a a DET DT 8 det
            battery battery NOUN NN 8 compound
            charger charger NOUN NN 4 obl
            ? ? PUNCT . 4 punct
        """)),
    ],
    "target": sent("Is the screen size three inches?", """
        Is be AUX VBZ 6 cop
        the the DET DT 4 det
        screen screen NOUN NN 4 compound
        size size NOUN NN 6 nsubj
        three three NUM CD 6 nummod
        inches inch NOUN NNS 0 root
        ? ? PUNCT . 6 punct
    """),
}

CAM3 = {
    "id": "cam3",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Camera & Photo"],
    "blocks": [
        ("title", sent("Porta lightbox with steel frame", """
            Porta porta PROPN NNP 2 compound
            lightbox lightbox NOUN NN 0 root
            with with ADP IN 5 case
            steel steel NOUN NN 5 compound
            frame frame NOUN NN 2 nmod
        """)),
        ("description", [
            sent("The lightbox has a steel frame.", """
                The the DET DT 2 det
                lightbox lightbox NOUN NN 3 nsubj
                has have VERB VBZ 0 root
                a a DET DT 6 det
                steel steel NOUN NN 6 compound
                frame frame NOUN NN 3 obj
                . . PUNCT . 3 punct
            """),
            sent("It provides even lighting.", """
                It it PRON PRP 2 nsubj
                provides provide VERB VBZ 0 root
                even even ADJ JJ 4 amod
                lighting lighting NOUN NN 2 obj
                . . PUNCT . 2 punct
            """),
        ]),
    ],
    "target": sent("Is the lightbox battery powered?", """
        Is be AUX VBZ 5 cop
        the the DET DT 3 det
        lightbox lightbox NOUN NN 5 nsubj
        battery battery NOUN NN 5 compound
        powered powered ADJ JJ 0 root
        ? ? PUNCT . 5 punct
    """),
}

BAG1 = {
    "id": "bag1",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Bags & Cases"],
    "blocks": [
        ("title", sent("Laptop bag with padded straps", """
            Laptop laptop NOUN NN 2 compound
            bag bag NOUN NN 0 root
            with with ADP IN 5 case
            padded padded ADJ JJ 5 amod
            straps strap NOUN NNS 2 nmod
        """)),
        ("description", [
            sent("This bag has padded straps and a roomy interior.", """
                This this DET DT 2 det
                bag bag NOUN NN 3 nsubj
                has have VERB VBZ 0 root
                padded padded ADJ JJ 5 amod
                straps strap NOUN NNS 3 obj
                and and CCONJ CC 9 cc
                a a DET DT 9 det
                roomy roomy ADJ JJ 9 amod
                interior interior NOUN NN 5 conj
                . . PUNCT . 3 punct
            """),
        ]),
        ("question", sent("Will this bag hold a gaming laptop and an iPad?", """
            Will will AUX MD 4 aux
            this this DET DT 3 det
            bag bag NOUN NN 4 nsubj
            hold hold VERB VB 0 root
            a a DET DT 7 det
            gaming gaming NOUN NN 7 compound
            laptop laptop NOUN NN 4 obj
            and and CCONJ CC 10 cc
            an an DET DT 10 det
            iPad ipad PROPN NNP 7 conj
            ? ? PUNCT . 4 punct
        """)),
    ],
    "target": sent("Does the bag fit a tablet?", """
        Does do AUX VBZ 4 aux
        the the DET DT 3 det
        bag bag NOUN NN 4 nsubj
        fit fit VERB VB 0 root
        a a DET DT 6 det
        tablet tablet NOUN NN 4 obj
        ? ? PUNCT . 4 punct
    """),
}

BAG2 = {
    "id": "bag2",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Bags & Cases"],
    "blocks": [
        ("title", sent("Camera case with shoulder strap", """
            Camera camera NOUN NN 2 compound
            case case NOUN NN 0 root
            with with ADP IN 5 case
            shoulder shoulder NOUN NN 5 compound
            strap strap NOUN NN 2 nmod
        """)),
        ("description", [
            sent("The case protects a camera from rain.", """
                The the DET DT 2 det
                case case NOUN NN 3 nsubj
                protects protect VERB VBZ 0 root
                a a DET DT 5 det
                camera camera NOUN NN 3 obj
                from from ADP IN 7 case
                rain rain NOUN NN 3 obl
                . . PUNCT . 3 punct
            """),
            sent("It has a shoulder strap.", """
                It it PRON PRP 2 nsubj
                has have VERB VBZ 0 root
                a a DET DT 5 det
                shoulder shoulder NOUN NN 5 compound
                strap strap NOUN NN 2 obj
                . . PUNCT . 2 punct
            """),
        ]),
    ],
    "target": sent("Does the case fit a tripod?", """
        Does do AUX VBZ 4 aux
        the the DET DT 3 det
        case case NOUN NN 4 nsubj
        fit fit VERB VB 0 root
        a a DET DT 6 det
        tripod tripod NOUN NN 4 obj
        ? ? PUNCT . 4 punct
    """),
}

SPK1 = {
    "id": "spk1",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Speakers"],
    "blocks": [
        ("title", sent("Yamaha bookshelf speakers", """
            Yamaha yamaha PROPN NNP 3 compound
            bookshelf bookshelf NOUN NN 3 compound
            speakers speaker NOUN NNS 0 root
        """)),
        ("description", [
            sent("The speakers deliver clear sound.", """
                The the DET DT 2 det
                speakers speaker NOUN NNS 3 nsubj
                deliver deliver VERB VBP 0 root
                clear clear ADJ JJ 5 amod
                sound sound NOUN NN 3 obj
                . . PUNCT . 3 punct
            """),
            sent("A speaker wire is included.", """
                A a DET DT 3 det
                speaker speaker NOUN NN 3 compound
                wire wire NOUN NN 5 nsubj
                is be AUX VBZ 5 aux
                included include VERB VBN 0 root
                . . PUNCT . 5 punct
            """),
        ]),
    ],
    "target": sent("Do the speakers include a mounting bracket?", """
        Do do AUX VBP 4 aux
        the the DET DT 3 det
        speakers speaker NOUN NNS 4 nsubj
        include include VERB VB 0 root
        a a DET DT 7 det
        mounting mounting NOUN NN 7 compound
        bracket bracket NOUN NN 4 obj
        ? ? PUNCT . 4 punct
    """),
}

SPK2 = {
    "id": "spk2",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Speakers"],
    "blocks": [
        ("title", sent("Wireless speaker with bass", """
            Wireless wireless ADJ JJ 2 amod
            speaker speaker NOUN NN 0 root
            with with ADP IN 4 case
            bass bass NOUN NN 2 nmod
        """)),
        ("description", [
            sent("The speaker supports wireless streaming.", """
                The the DET DT 2 det
                speaker speaker NOUN NN 3 nsubj
                supports support VERB VBZ 0 root
                wireless wireless ADJ JJ 5 amod
                streaming streaming NOUN NN 3 obj
                . . PUNCT . 3 punct
            """),
            sent("The battery charges fast.", """
                The the DET DT 2 det
                battery battery NOUN NN 3 nsubj
                charges charge VERB VBZ 0 root
                fast fast ADV RB 3 advmod
                . . PUNCT . 3 punct
            """),
        ]),
    ],
    "target": sent("Does the speaker have a remote control?", """
        Does do AUX VBZ 4 aux
        the the DET DT 3 det
        speaker speaker NOUN NN 4 nsubj
        have have VERB VB 0 root
        a a DET DT 7 det
        remote remote ADJ JJ 7 amod
        control control NOUN NN 4 obj
        ? ? PUNCT . 4 punct
    """),
}

# --- dialogs ----------------------------------------------------------------

DLG1 = {
    "id": "dlg1",
    "scenario": "dialog",
    "split": "test",
    "blocks": [
        ("utterance", sent("My wifi driver crashes daily.", """
            My my PRON PRP$ 3 nmod
            wifi wifi NOUN NN 3 compound
            driver driver NOUN NN 4 nsubj
            crashes crash VERB VBZ 0 root
            daily daily ADV RB 4 advmod
            . . PUNCT . 4 punct
        """)),
        ("utterance", sent("Did you update the driver?", """
            Did do AUX VBD 3 aux
            you you PRON PRP 3 nsubj
            update update VERB VB 0 root
            the the DET DT 5 det
            driver driver NOUN NN 3 obj
            ? ? PUNCT . 3 punct
        """)),
        ("utterance", sent("I am installing the new version.", """
            I i PRON PRP 3 nsubj
            am be AUX VBZ 3 aux
            installing install VERB VBG 0 root
            the the DET DT 6 det
            new new ADJ JJ 6 amod
            version version NOUN NN 3 obj
            . . PUNCT . 3 punct
        """)),
        ("utterance", sent("The network still drops.", """
            The the DET DT 2 det
            network network NOUN NN 4 nsubj
            still still ADV RB 4 advmod
            drops drop VERB VBZ 0 root
            . . PUNCT . 4 punct
        """)),
        ("utterance", sent("Try rebooting the machine.", """
            Try try VERB VB 0 root
            rebooting reboot VERB VBG 1 xcomp
            the the DET DT 4 det
            machine machine NOUN NN 2 obj
            . . PUNCT . 1 punct
        """)),
    ],
    "target": sent("Did you reboot the machine after the update?", """
        Did do AUX VBD 3 aux
        you you PRON PRP 3 nsubj
        reboot reboot VERB VB 0 root
        the the DET DT 5 det
        machine machine NOUN NN 3 obj
        after after ADP IN 8 case
        the the DET DT 8 det
        update update NOUN NN 3 obl
        ? ? PUNCT . 3 punct
    """),
}

DLG2 = {
    "id": "dlg2",
    "scenario": "dialog",
    "split": "train",
    "blocks": [
        ("utterance", sent("The wireless network fails after suspend.", """
            The the DET DT 3 det
            wireless wireless ADJ JJ 3 amod
            network network NOUN NN 4 nsubj
            fails fail VERB VBZ 0 root
            after after ADP IN 6 case
            suspend suspend NOUN NN 4 obl
            . . PUNCT . 4 punct
        """)),
        ("utterance", sent("Which driver version is installed?", """
            Which which DET WDT 3 det
            driver driver NOUN NN 3 compound
            version version NOUN NN 5 nsubj
            is be AUX VBZ 5 aux
            installed install VERB VBN 0 root
            ? ? PUNCT . 5 punct
        """)),
        ("utterance", sent("The website lists the latest driver.", """
            The the DET DT 2 det
            website website NOUN NN 3 nsubj
            lists list VERB VBZ 0 root
            the the DET DT 6 det
            latest latest ADJ JJ 6 amod
            driver driver NOUN NN 3 obj
            . . PUNCT . 3 punct
        """)),
        ("utterance", sent("My kernel is old.", """
            My my PRON PRP$ 2 nmod
            kernel kernel NOUN NN 4 nsubj
            is be AUX VBZ 4 cop
            old old ADJ JJ 0 root
            . . PUNCT . 4 punct
        """)),
        ("utterance", sent("Update the kernel first.", """
            Update update VERB VB 0 root
            the the DET DT 3 det
            kernel kernel NOUN NN 1 obj
            first first ADV RB 1 advmod
            . . PUNCT . 1 punct
        """)),
    ],
    "target": sent("Which kernel version do you run?", """
        Which which DET WDT 3 det
        kernel kernel NOUN NN 3 compound
        version version NOUN NN 6 obj
        do do AUX VBP 6 aux
        you you PRON PRP 6 nsubj
        run run VERB VB 0 root
        ? ? PUNCT . 6 punct
    """),
}

DLG3 = {
    "id": "dlg3",
    "scenario": "dialog",
    "split": "train",
    "blocks": [
        ("utterance", sent("My disk is full.", """
            My my PRON PRP$ 2 nmod
            disk disk NOUN NN 4 nsubj
            is be AUX VBZ 4 cop
            full full ADJ JJ 0 root
            . . PUNCT . 4 punct
        """)),
        ("utterance", sent("Check the log files.", """
            Check check VERB VB 0 root
            the the DET DT 4 det
            log log NOUN NN 4 compound
            files file NOUN NNS 1 obj
            . . PUNCT . 1 punct
        """)),
        ("utterance", sent("The logs are filling the partition.", """
            The the DET DT 2 det
            logs log NOUN NNS 4 nsubj
            are be AUX VBP 4 aux
            filling fill VERB VBG 0 root
            the the DET DT 6 det
            partition partition NOUN NN 4 obj
            . . PUNCT . 4 punct
        """)),
        ("utterance", sent("I deleted the old logs.", """
            I i PRON PRP 2 nsubj
            deleted delete VERB VBD 0 root
            the the DET DT 5 det
            old old ADJ JJ 5 amod
            logs log NOUN NNS 2 obj
            . . PUNCT . 2 punct
        """)),
        ("utterance", sent("Resize the partition if needed.", """
            Resize resize VERB VB 0 root
            the the DET DT 3 det
            partition partition NOUN NN 1 obj
            if if SCONJ IN 5 mark
            needed need VERB VBN 1 advcl
            . . PUNCT . 1 punct
        """)),
    ],
    "target": sent("Which partition holds the logs?", """
        Which which DET WDT 2 det
        partition partition NOUN NN 3 nsubj
        holds hold VERB VBZ 0 root
        the the DET DT 5 det
        logs log NOUN NNS 3 obj
        ? ? PUNCT . 3 punct
    """),
}

DLG4 = {
    "id": "dlg4",
    "scenario": "dialog",
    "split": "train",
    "blocks": [
        ("utterance", sent("The system fails to boot.", """
            The the DET DT 2 det
            system system NOUN NN 3 nsubj
            fails fail VERB VBZ 0 root
            to to PART TO 5 mark
            boot boot VERB VB 3 xcomp
            . . PUNCT . 3 punct
        """)),
        ("utterance", sent("Check the boot partition.", """
            Check check VERB VB 0 root
            the the DET DT 4 det
            boot boot NOUN NN 4 compound
            partition partition NOUN NN 1 obj
            . . PUNCT . 1 punct
        """)),
        ("utterance", sent("The partition looks empty.", """
            The the DET DT 2 det
            partition partition NOUN NN 3 nsubj
            looks look VERB VBZ 0 root
            empty empty ADJ JJ 3 xcomp
            . . PUNCT . 3 punct
        """)),
        ("utterance", sent("Reinstall the bootloader.", """
            Reinstall reinstall VERB VB 0 root
            the the DET DT 3 det
            bootloader bootloader NOUN NN 1 obj
            . . PUNCT . 1 punct
        """)),
        ("utterance", sent("The bootloader needs a config file.", """
            The the DET DT 2 det
            bootloader bootloader NOUN NN 3 nsubj
            needs need VERB VBZ 0 root
            a a DET DT 6 det
            config config NOUN NN 6 compound
            file file NOUN NN 3 obj
            . . PUNCT . 3 punct
        """)),
    ],
    "target": sent("Does the config file list the partition?", """
        Does do AUX VBZ 5 aux
        the the DET DT 4 det
        config config NOUN NN 4 compound
        file file NOUN NN 5 nsubj
        list list VERB VB 0 root
        the the DET DT 7 det
        partition partition NOUN NN 5 obj
        ? ? PUNCT . 5 punct
    """),
}

CONTEXTS = [CAM1, CAM2, CAM3, BAG1, BAG2, SPK1, SPK2, DLG1, DLG2, DLG3, DLG4]

# community-QA parses go to the sidecar file; dialogs stay inline
SIDECAR_IDS = {"cam1", "cam2", "cam3", "bag1", "bag2", "spk1", "spk2"}

# --- later-arriving products for the dynamic-expansion demo ------------------

NEW1 = {
    "id": "new1",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Camera & Photo"],
    "blocks": [
        ("title", sent("Canon camera with memory card", """
            Canon canon PROPN NNP 2 compound
            camera camera NOUN NN 0 root
            with with ADP IN 5 case
            memory memory NOUN NN 5 compound
            card card NOUN NN 2 nmod
        """)),
        ("description", [
            sent("The camera stores photos on a memory card.", """
                The the DET DT 2 det
                camera camera NOUN NN 3 nsubj
                stores store VERB VBZ 0 root
                photos photo NOUN NNS 3 obj
                on on ADP IN 8 case
                a a DET DT 8 det
                memory memory NOUN NN 8 compound
                card card NOUN NN 3 obl
                . . PUNCT . 3 punct
            """),
        ]),
    ],
}

NEW2 = {
    "id": "new2",
    "scenario": "communityQA",
    "split": "train",
    "class_hint": ["Camera & Photo"],
    "blocks": [
        ("title", sent("Spare memory card for the camera", """
            Spare spare ADJ JJ 3 amod
            memory memory NOUN NN 3 compound
            card card NOUN NN 0 root
            for for ADP IN 6 case
            the the DET DT 6 det
            camera camera NOUN NN 3 nmod
        """)),
        ("description", [
            sent("The memory card stores many photos.", """
                The the DET DT 3 det
                memory memory NOUN NN 3 compound
                card card NOUN NN 4 nsubj
                stores store VERB VBZ 0 root
                many many ADJ JJ 6 amod
                photos photo NOUN NNS 4 obj
                . . PUNCT . 4 punct
            """),
        ]),
    ],
}

NEW_PRODUCTS = [NEW1, NEW2]

# --- embeddings -------------------------------------------------------------

BASE_WORDS = [
    # products / QA
    "camera", "zoom", "digital", "optical", "image", "stabilization", "video",
    "light", "lens", "battery", "hour", "charger", "screen", "size", "inch",
    "bag", "laptop", "gaming", "ipad", "case", "shoulder", "strap", "rain",
    "tripod", "speaker", "sound", "wire", "mounting", "bracket", "bass",
    "streaming", "remote", "control", "lightbox", "steel", "frame", "lighting",
    "interior", "sony", "nikon", "porta", "yamaha", "bookshelf", "padded",
    "roomy", "wide", "low", "even", "powered", "clear", "tablet_own",
    "camcorder_own", "wireless_own",
    "canon", "memory", "card", "photo", "spare",
    # dialogs
    "wifi", "driver", "network", "version", "kernel", "website", "machine",
    "update", "disk", "log", "file", "partition", "bootloader", "config",
    "system", "boot", "suspend", "new", "old", "latest", "full", "empty",
    # verbs (for question embeddings)
    "have", "do", "be", "hold", "fit", "include", "support", "run", "list",
    "check", "reboot", "install", "crash", "fail", "record", "provide",
    "protect", "last", "come", "deliver", "charge", "drop", "try", "fill",
    "delete", "resize", "need", "look", "reinstall", "store", "three", "ten",
]

SIMILAR = {
    # word: (anchor, cosine, own-axis)
    "camcorder": ("camera", 0.72, "camcorder_own"),
    "wireless": ("wifi", 0.72, "wireless_own"),
    "tablet": ("ipad", 0.85, "tablet_own"),
}


def build_embeddings() -> list[str]:
    dim = len(BASE_WORDS)
    axis = {w: i for i, w in enumerate(BASE_WORDS)}

    def one_hot(i: int) -> list[float]:
        v = [0.0] * dim
        v[i] = 1.0
        return v

    rows = {}
    for w, i in axis.items():
        if w.endswith("_own"):
            continue
        rows[w] = one_hot(i)
    for w, (anchor, cos, own) in SIMILAR.items():
        v = [0.0] * dim
        v[axis[anchor]] = cos
        v[axis[own]] = math.sqrt(1.0 - cos * cos)
        rows[w] = v
    lines = []
    for w in sorted(rows):
        comps = " ".join(f"{x:.6f}" for x in rows[w])
        lines.append(f"{w} {comps}")
    return lines


# --- usefulness scores for the product questions (annotation-style) ---------

SCORES = [
    ("Does the camcorder have optical zoom?", 4.3),
    ("Is the screen size three inches?", 3.7),
    ("Is the lightbox battery powered?", 4.0),
    ("Does the bag fit a tablet?", 3.3),
    ("Does the case fit a tripod?", 3.0),
    ("Do the speakers include a mounting bracket?", 4.7),
    ("Does the speaker have a remote control?", 3.7),
    ("Is it good?", 1.3),
    ("Can you tell me more?", 0.7),
    ("Is this nice?", 1.7),
    ("What about it?", 2.3),
]


def context_record(ctx: dict, sidecar_chunks: list[str] | None) -> str:
    obj = {"id": ctx["id"], "scenario": ctx["scenario"], "split": ctx["split"]}
    if "class_hint" in ctx:
        obj["class_hint"] = ctx["class_hint"]
    blocks = []
    parses = []
    inline = sidecar_chunks is None or ctx["id"] not in SIDECAR_IDS
    for block_idx, (kind, content) in enumerate(ctx["blocks"]):
        sents = content if isinstance(content, list) else [content]
        blocks.append({"kind": kind, "text": " ".join(s["text"] for s in sents)})
        if inline:
            parses.append("\n\n".join(s["conllu"] for s in sents))
        else:
            keyed = [
                f"# context = {ctx['id']}\n# block = {block_idx}\n{s['conllu']}"
                for s in sents
            ]
            sidecar_chunks.append("\n\n".join(keyed))
    obj["blocks"] = blocks
    if parses:
        obj["parses"] = parses
    if "target" in ctx:
        obj["target"] = {"text": ctx["target"]["text"], "conllu": ctx["target"]["conllu"]}
    return json.dumps(obj, sort_keys=True)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    sidecar_chunks: list[str] = []
    jsonl = [context_record(ctx, sidecar_chunks) for ctx in CONTEXTS]

    (OUT / "contexts.jsonl").write_text("\n".join(jsonl) + "\n", encoding="utf-8")
    (OUT / "contexts.conllu").write_text("\n\n".join(sidecar_chunks) + "\n", encoding="utf-8")
    new_lines = [context_record(ctx, None) for ctx in NEW_PRODUCTS]
    (OUT / "new_products.jsonl").write_text("\n".join(new_lines) + "\n", encoding="utf-8")
    (OUT / "embeddings.txt").write_text("\n".join(build_embeddings()) + "\n", encoding="utf-8")

    refs = [
        json.dumps({"context_id": c["id"], "references": [c["target"]["text"]]}, sort_keys=True)
        for c in CONTEXTS
    ]
    (OUT / "refs.jsonl").write_text("\n".join(refs) + "\n", encoding="utf-8")

    scores = [json.dumps({"question": q, "score": s}, sort_keys=True) for q, s in SCORES]
    (OUT / "scores.jsonl").write_text("\n".join(scores) + "\n", encoding="utf-8")

    config = {
        "contexts": "data/toy/contexts.jsonl",
        "embeddings": "data/toy/embeddings.txt",
        "k": 2,
        "cap": 400,
        "seed": 0,
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote toy corpus to {OUT}")


if __name__ == "__main__":
    main()
