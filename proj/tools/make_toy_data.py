#!/usr/bin/env python3
# Copyright 2026 The mlsumeval Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled toy dataset used by the end-to-end tests.

Everything here is synthetic: the texts are short hand-written news-style
snippets, the annotation sidecar comes from a regex tokenizer and a tiny
English lexicon, the embeddings are hash-seeded random vectors per token,
and the human scores are drawn around a token-overlap quality signal.

    python3 tools/make_toy_data.py tests/data/toy
"""

import hashlib
import json
import random
import re
import sys
import unicodedata
from pathlib import Path

SYSTEMS = ("gemini", "gpt")
WORKERS = 3
DIM = 8

# (id, lang, article sentences, reference sentences)
RECORDS = [
    ("en-001", "en",
     ["The city council approved a new budget on Monday.",
      "The plan raises spending on public transport.",
      "Mayor Anna Lopez said buses will run every ten minutes."],
     ["The council approved a budget that raises transport spending.",
      "Buses will run every ten minutes."]),
    ("en-002", "en",
     ["Heavy rain flooded several roads in the north.",
      "Emergency teams rescued three drivers.",
      "Officials warned that more storms are expected this week."],
     ["Rain flooded roads and teams rescued three drivers.",
      "More storms are expected."]),
    ("en-003", "en",
     ["The athletes are preparing for the championship.",
      "Coach David Kim praised their discipline.",
      "The final match takes place in London next month."],
     ["The athletes are preparing for the championship in London.",
      "Their coach praised their discipline."]),
    ("es-001", "es",
     ["El gobierno anunció un plan para reducir la inflación.",
      "Los precios de los alimentos subieron este año.",
      "La ministra María Torres presentará los detalles mañana."],
     ["El gobierno anunció un plan contra la inflación.",
      "Los detalles se presentarán mañana."]),
    ("es-002", "es",
     ["Un incendio forestal quemó miles de hectáreas en el sur.",
      "Los bomberos trabajaron durante toda la noche.",
      "No se registraron víctimas según las autoridades."],
     ["Un incendio quemó miles de hectáreas en el sur.",
      "Los bomberos trabajaron toda la noche."]),
    ("es-003", "es",
     ["La universidad abrió un nuevo laboratorio de energía solar.",
      "El proyecto recibió fondos europeos.",
      "Los estudiantes podrán participar en las investigaciones."],
     ["La universidad abrió un laboratorio de energía solar.",
      "Los estudiantes participarán en las investigaciones."]),
    ("tr-001", "tr",
     ["Belediye yeni bir park projesini onayladı.",
      "Parkta çocuklar için oyun alanları olacak.",
      "İnşaatın gelecek yıl bitmesi bekleniyor."],
     ["Belediye yeni park projesini onayladı.",
      "Parkta oyun alanları olacak."]),
    ("tr-002", "tr",
     ["Şiddetli kar yağışı nedeniyle okullar tatil edildi.",
      "Yollarda ulaşım aksadı.",
      "Meteoroloji uzmanları soğuk havanın süreceğini söyledi."],
     ["Kar yağışı nedeniyle okullar tatil edildi.",
      "Soğuk havanın sürmesi bekleniyor."]),
    ("tr-003", "tr",
     ["Yerel takım şampiyonluk maçını kazandı.",
      "Taraftarlar sokaklarda kutlama yaptı.",
      "Teknik direktör oyuncularına teşekkür etti."],
     ["Yerel takım şampiyonluğu kazandı.",
      "Taraftarlar sokaklarda kutladı."]),
    ("uk-001", "uk",
     ["Місто відкрило нову бібліотеку в центрі.",
      "Бібліотека має читальний зал для дітей.",
      "Відвідувачі можуть користуватися нею безкоштовно."],
     ["У центрі міста відкрили нову бібліотеку.",
      "Відвідування безкоштовне."]),
    ("uk-002", "uk",
     ["Фермери зібрали рекордний урожай пшениці.",
      "Погода цього року була сприятливою.",
      "Частину зерна експортують до Європи."],
     ["Фермери зібрали рекордний урожай.",
      "Частину зерна експортують."]),
    ("ar-001", "ar",
     ["افتتحت الحكومة مستشفى جديدا في العاصمة.",
      "يضم المستشفى مئتي سرير.",
      "وقال الوزير إن الخدمة ستكون مجانية."],
     ["افتتحت الحكومة مستشفى جديدا.",
      "الخدمة ستكون مجانية."]),
    ("ar-002", "ar",
     ["ارتفعت درجات الحرارة في المنطقة هذا الأسبوع.",
      "نصحت السلطات السكان بالبقاء في المنازل.",
      "من المتوقع أن تنخفض الحرارة يوم الجمعة."],
     ["ارتفعت درجات الحرارة هذا الأسبوع.",
      "نصحت السلطات السكان بالبقاء في المنازل."]),
    ("he-001", "he",
     ["העירייה פתחה מרכז קהילתי חדש.",
      "המרכז מציע חוגים לילדים ולמבוגרים.",
      "ההרשמה תיפתח בשבוע הבא."],
     ["העירייה פתחה מרכז קהילתי.",
      "ההרשמה תיפתח בשבוע הבא."]),
    ("he-002", "he",
     ["חוקרים גילו מין חדש של צמח במדבר.",
      "הצמח שורד בתנאי יובש קיצוניים.",
      "המחקר פורסם בכתב עת מדעי."],
     ["חוקרים גילו צמח חדש במדבר.",
      "הצמח שורד ביובש קיצוני."]),
    ("zh-001", "zh",
     ["市政府宣布了新的交通计划。",
      "地铁将延长运营时间。",
      "市民对这个计划表示欢迎。"],
     ["市政府宣布新的交通计划。",
      "地铁将延长运营时间。"]),
    ("zh-002", "zh",
     ["一场大雨导致多条道路被淹。",
      "救援人员救出了五名司机。",
      "气象部门预计本周还有降雨。"],
     ["大雨导致道路被淹。",
      "救援人员救出五名司机。"]),
    ("zh-003", "zh",
     ["这所大学建成了新的图书馆。",
      "图书馆可以容纳两千名学生。",
      "学校表示图书馆将于下月开放。"],
     ["大学建成了新图书馆。",
      "图书馆将于下月开放。"]),
    ("yo-001", "yo",
     ["Ìjọba kéde ètò tuntun fún àwọn àgbẹ̀.",
      "Àwọn àgbẹ̀ yóò gba ìrànlọ́wọ́ owó.",
      "Ètò náà yóò bẹ̀rẹ̀ ní oṣù tó ń bọ̀."],
     ["Ìjọba kéde ètò tuntun fún àwọn àgbẹ̀.",
      "Ètò náà yóò bẹ̀rẹ̀ ní oṣù tó ń bọ̀."]),
    ("yo-002", "yo",
     ["Òjò ńlá ba ọ̀pọ̀ ilé jẹ́ ní ìlú náà.",
      "Àwọn olùgbé sá kúrò ní ilé wọn.",
      "Ìjọba ṣèlérí láti ràn wọ́n lọ́wọ́."],
     ["Òjò ńlá ba ọ̀pọ̀ ilé jẹ́.",
      "Ìjọba ṣèlérí ìrànlọ́wọ́."]),
]

# Minimal English lexicon: surface -> (POS, lemma). Everything else is
# tagged by shape only.
EN_LEXICON = {
    "approved": ("VERB", "approve"), "raises": ("VERB", "raise"),
    "said": ("VERB", "say"), "run": ("VERB", "run"), "will": ("AUX", "will"),
    "flooded": ("VERB", "flood"), "rescued": ("VERB", "rescue"),
    "warned": ("VERB", "warn"), "are": ("AUX", "be"), "is": ("AUX", "be"),
    "expected": ("VERB", "expect"), "preparing": ("VERB", "prepare"),
    "praised": ("VERB", "praise"), "takes": ("VERB", "take"),
    "place": ("NOUN", "place"), "council": ("NOUN", "council"),
    "budget": ("NOUN", "budget"), "plan": ("NOUN", "plan"),
    "spending": ("NOUN", "spending"), "transport": ("NOUN", "transport"),
    "buses": ("NOUN", "bus"), "minutes": ("NOUN", "minute"),
    "rain": ("NOUN", "rain"), "roads": ("NOUN", "road"),
    "teams": ("NOUN", "team"), "drivers": ("NOUN", "driver"),
    "officials": ("NOUN", "official"), "storms": ("NOUN", "storm"),
    "week": ("NOUN", "week"), "athletes": ("NOUN", "athlete"),
    "championship": ("NOUN", "championship"), "coach": ("NOUN", "coach"),
    "discipline": ("NOUN", "discipline"), "match": ("NOUN", "match"),
    "month": ("NOUN", "month"), "city": ("NOUN", "city"),
    "north": ("NOUN", "north"), "and": ("CCONJ", "and"),
    "that": ("SCONJ", "that"), "the": ("DET", "the"), "a": ("DET", "a"),
    "their": ("PRON", "their"), "on": ("ADP", "on"), "in": ("ADP", "in"),
    "for": ("ADP", "for"), "every": ("DET", "every"),
}
EN_ENTITIES = {
    "Anna": "B-PER", "Lopez": "I-PER", "David": "B-PER", "Kim": "I-PER",
    "London": "B-LOC", "Monday": "B-DATE",
}

TOKEN_RE = re.compile(
    "[\u3040-\u30ff\u4e00-\u9fff]|[\\w\u0300-\u036f]+|[^\\w\\s]")
SENTENCE_END = {".", "!", "?", "。", "؟"}


def tokenize(text):
    return [(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def annotate(text, lang):
    tokens = []
    sentence = 0
    for surface, begin, end in tokenize(text):
        punct = all(unicodedata.category(c).startswith("P") for c in surface)
        pos = lemma = ner = None
        if punct:
            pos = "PUNCT"
            if lang == "en":
                lemma, ner = surface, "O"
        elif lang == "en":
            pos, lemma = EN_LEXICON.get(surface.lower(), (None, None))
            ner = EN_ENTITIES.get(surface)
            if ner:
                pos = "PROPN"
            if lemma is None:
                lemma = surface.lower() if pos != "PROPN" else surface
            if pos is None:
                pos = "X"
            ner = ner or "O"
        tokens.append({"surface": surface, "lemma": lemma, "pos": pos,
                       "ner": ner, "sentence_id": sentence,
                       "span": [begin, end]})
        if surface in SENTENCE_END:
            sentence += 1
    last = max(t["sentence_id"] for t in tokens)
    if not any(t["sentence_id"] == last for t in tokens):
        raise ValueError("sentence ids not contiguous")
    return tokens


def vector(token):
    seed = int.from_bytes(hashlib.sha256(token.lower().encode()).digest()[:8],
                          "little")
    rng = random.Random(seed)
    return [round(rng.gauss(0.0, 1.0), 6) for _ in range(DIM)]


def overlap(candidate, reference):
    c = [t for t, _, _ in tokenize(candidate.lower())]
    r = set(t for t, _, _ in tokenize(reference.lower()))
    return sum(1 for t in c if t in r) / max(1, len(c))


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240601)
    sep = {"zh": "", "ja": ""}

    corpus, sidecar, embeddings, annotations = [], [], [], []
    vocab_words = set()
    for item, lang, article_sents, reference_sents in RECORDS:
        joiner = sep.get(lang, " ")
        article = joiner.join(article_sents)
        reference = joiner.join(reference_sents)
        # gemini: lead-2 extract; gpt: first article sentence + last
        # reference sentence (closer to the reference).
        candidates = {
            "gemini": joiner.join(article_sents[:2]),
            "gpt": joiner.join([article_sents[0], reference_sents[-1]]),
        }
        corpus.append({
            "id": item, "lang": lang, "article": article,
            "reference": reference,
            "candidates": [{"system": s, "text": candidates[s]}
                           for s in SYSTEMS],
        })
        sidecar.append({"item_id": item, "side": "article",
                        "tokens": annotate(article, lang)})
        sidecar.append({"item_id": item, "side": "reference",
                        "tokens": annotate(reference, lang)})
        for s in SYSTEMS:
            sidecar.append({"item_id": item, "side": "candidate", "system": s,
                            "tokens": annotate(candidates[s], lang)})

        def emb(side, text, system=None):
            toks = [t for t, _, _ in tokenize(text)]
            line = {"item_id": item, "side": side}
            if system:
                line["system"] = system
            line["tokens"] = toks
            line["vectors"] = [vector(t) for t in toks]
            return line

        embeddings.append(emb("reference", reference))
        for s in SYSTEMS:
            embeddings.append(emb("candidate", candidates[s], s))
        for text in [article, reference, *candidates.values()]:
            vocab_words.update(t for t, _, _ in tokenize(text.lower()))

        for s in SYSTEMS:
            quality = 1.5 + 2.5 * overlap(candidates[s], reference)
            for criterion in ("coherence", "completeness"):
                for w in range(1, WORKERS + 1):
                    score = round(quality + rng.gauss(0.0, 0.6))
                    annotations.append({
                        "item_id": item, "system_id": s,
                        "worker_id": f"{lang}-w{w}", "criterion": criterion,
                        "score": max(1, min(4, score)),
                    })

    def write(name, rows):
        with open(out / name, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False) + "\n")

    write("corpus.jsonl", corpus)
    write("sidecar.jsonl", sidecar)
    write("embeddings.jsonl", embeddings)
    write("annotations.jsonl", annotations)

    # WordPiece-style vocabulary: every character as a word start and as a
    # continuation, plus the first three characters of each word.
    units = set()
    for word in vocab_words:
        for ch in word:
            units.add(ch)
            units.add("##" + ch)
        if len(word) > 3:
            units.add(word[:3])
    with open(out / "vocab.txt", "w", encoding="utf-8") as f:
        f.write("[UNK]\n")
        for u in sorted(units):
            f.write(u + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/toy")
