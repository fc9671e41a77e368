#!/usr/bin/env python3
"""Independent re-implementation of the 45 per-round interaction features.

Reads the 20-round fixture under tests/fixtures/features and writes the
expected values the C++ extractor is checked against. The word lists are read
from src/lexicon.cpp (data only); every rule is re-derived here from the
feature definitions in the README.

Usage: features_oracle.py > tests/fixtures/features/expected.json
"""

import json
import math
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
FIXTURE = ROOT / "tests" / "fixtures" / "features"
MASK = (1 << 64) - 1


def load_lexicon():
    src = (ROOT / "src" / "lexicon.cpp").read_text()
    lists = {}
    for m in re.finditer(r"(\w+)\(\) \{\s*static const (?:WordSet|std::vector<std::string>) k\w+ = \{(.*?)\};", src, re.S):
        lists[m.group(1)] = re.findall(r'"([^"]*)"', m.group(2))
    return lists


LEX = load_lexicon()
STOP = set(LEX["stopwords"])
SUBORD = set(LEX["subordinators"])
HEDGES = set(LEX["hedges"])
MODALS = set(LEX["modals"])
POLITE = set(LEX["polite_words"])
TEMPORAL = set(LEX["temporal_words"])
BE = set(LEX["be_forms"])
IRREG = set(LEX["irregular_participles"])
EXCEPT = set(LEX["participle_exceptions"])
PRONOUNS = set(LEX["third_person_pronouns"])
EXAMPLES = LEX["example_phrases"]
META = LEX["meta_phrases"]


def is_word_byte(b):
    return b >= 0x80 or chr(b).isalnum() and b < 0x80


def strip(tok):
    b = tok.encode()
    i, j = 0, len(b)
    while i < j and not is_word_byte(b[i]):
        i += 1
    while j > i and not is_word_byte(b[j - 1]):
        j -= 1
    return b[i:j].decode()


def words(s):
    out = []
    for tok in s.split():
        w = strip(tok)
        if w:
            out.append(w.lower())
    return out


def sentences(s):
    return [w for w in (words(p) for p in re.split(r"[.!?]+", s)) if w]


def syllables(word):
    w = "".join(c for c in word.lower() if "a" <= c <= "z")
    n = len(re.findall(r"[aeiouy]+", w))
    if w.endswith("e") and not w.endswith("le"):
        n -= 1
    return max(n, 1)


def readability(s):
    ws = words(s)
    if not ws:
        return 0.0
    n_s = max(len(sentences(s)), 1)
    syl = float(sum(syllables(w) for w in ws))
    return 206.835 - 1.015 * (len(ws) / n_s) - 84.6 * (syl / len(ws))


def ttr(s):
    ws = words(s)
    return len(set(ws)) / len(ws) if ws else 0.0


def depth(s):
    ss = sentences(s)
    if not ss:
        return 0.0
    return sum(1.0 + sum(1 for w in x if w in SUBORD) for x in ss) / len(ss)


def fnv(s):
    h = 0xCBF29CE484222325
    for b in s.encode():
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def splitmix(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def embed(s):
    v = [0] * 256
    ws = words(s)
    toks = ws + [ws[i - 1] + " " + ws[i] for i in range(1, len(ws))]
    for t in toks:
        h = fnv(t)
        v[h % 256] += -1 if splitmix(h) & 1 else 1
    return v


def cos(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = sum(x * x for x in a)
    nb = sum(x * x for x in b)
    if na == 0 or nb == 0:
        return 0.0
    return max(-1.0, min(1.0, dot / math.sqrt(float(na) * float(nb))))


def entities(s):
    toks = s.split()
    spans, cur = [], None
    for i, raw in enumerate(toks):
        w = strip(raw)
        initial = i == 0 or toks[i - 1][-1] in ".!?"
        cap = bool(w) and "A" <= w[0] <= "Z" and w != "I"
        if not cap or initial:
            if cur:
                spans.append(cur)
            cur = None
            continue
        if cur is None:
            cur = [i, i + 1, []]
        cur[1] = i + 1
        cur[2].append(w)
        last = raw[-1]
        if not (last.isalnum() and ord(last) < 0x80) and ord(last) < 0x80:
            spans.append(cur)
            cur = None
    if cur:
        spans.append(cur)
    return [(b, e, " ".join(t)) for b, e, t in spans]


def passive(s):
    ws = words(s)
    n = 0
    for i, w in enumerate(ws):
        if w not in BE:
            continue
        for x in ws[i + 1:i + 3]:
            if x in IRREG or ((x.endswith("ed") or x.endswith("en")) and len(x) > 3 and x not in EXCEPT):
                n += 1
                break
    return n


def coref(s):
    sp = entities(s)
    if not sp:
        return 0
    toks = s.split()
    return sum(1 for t in toks[sp[0][1]:] if strip(t).lower() in PRONOUNS)


def f1(a, b):
    wa, wb = words(a), words(b)
    if not wa or not wb:
        return 0.0
    pool = {}
    for w in wb:
        pool[w] = pool.get(w, 0) + 1
    common = 0
    for w in wa:
        if pool.get(w, 0) > 0:
            pool[w] -= 1
            common += 1
    if common == 0:
        return 0.0
    p, r = common / len(wa), common / len(wb)
    return 2 * p * r / (p + r)


def key_terms(s, n=20):
    freq = {}
    for w in words(s):
        if len(w) >= 3 and w not in STOP:
            freq[w] = freq.get(w, 0) + 1
    return [w for w, _ in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))[:n]]


def qtype(q):
    ws = words(q)
    if not ws:
        return 0
    order = {"what": 1, "who": 2, "whom": 2, "whose": 2, "where": 3, "when": 4, "why": 5, "how": 6, "which": 7}
    aux = {"is", "are", "was", "were", "am", "do", "does", "did", "can", "could", "will", "would", "shall", "should",
           "may", "might", "must", "has", "have", "had", "isn't", "aren't", "don't", "doesn't", "didn't"}
    if ws[0] in order:
        return order[ws[0]]
    return 8 if ws[0] in aux else 0


def sd(xs):
    if not xs:
        return 0.0
    m = sum(xs) / len(xs)
    return math.sqrt(sum((x - m) ** 2 for x in xs) / len(xs))


def has_phrase(s, phrases):
    low = s.lower()
    return 1.0 if any(p in low for p in phrases) else 0.0


def main():
    doc = json.loads((FIXTURE / "manifest.json").read_text())["contexts"][0]
    kw = {l.strip().lower() for l in (FIXTURE / "keywords" / "song_lyrics.txt").read_text().splitlines()
          if l.strip() and not l.strip().startswith("#")}
    events = [json.loads(l) for l in (FIXTURE / "run" / "transcript.jsonl").read_text().splitlines() if l.strip()]
    Q = {e["round"]: e["content"] for e in events if e["event_type"] == "student_question"}
    A = {e["round"]: e["content"] for e in events if e["event_type"] == "teacher_answer"}
    ACC = {e["round"]: e["accuracy"] for e in events if e["event_type"] == "quiz_eval"}
    lesson = next((e["content"] for e in events if e["event_type"] == "lesson_shown"), None)
    context = doc.get("body") or doc.get("caption", "")
    segments = [p for p in re.split(r"[.!?]", context) if words(p)]

    rows = []
    for r in sorted(Q):
        q, a = Q[r], A[r]
        qw, aw = words(q), words(a)
        qe = {j: embed(Q[j]) for j in range(1, r + 1)}
        ae = {j: embed(A[j]) for j in range(1, r + 1)}
        f = {}
        ents_q = entities(q)
        f["question_length"] = len(qw)
        f["question_complexity"] = depth(q)
        f["lexical_sophistication"] = sum(len(w.encode()) for w in qw) / len(qw) if qw else 0.0
        f["named_entity_count"] = len(ents_q)
        f["question_informativeness"] = len(set(qw) & kw)
        f["question_directness"] = 1.0 if "?" in q else 0.0
        f["politeness_hedging"] = sum(1 for w in qw if w in HEDGES)
        f["question_type"] = qtype(q)
        f["question_novelty"] = 1.0 if r == 1 else 1.0 - max(0.0, max(cos(qe[r], qe[j]) for j in range(1, r)))
        f["question_specificity"] = 1.0 if ents_q else 0.0

        f["response_length"] = len(aw)
        f["info_density"] = (len(aw) - sum(1 for w in aw if w in STOP)) / len(aw) if aw else 0.0
        f["response_novelty"] = 1.0 if r == 1 else 1.0 - max(0.0, max(cos(ae[r], ae[j]) for j in range(1, r)))
        best, best_f = "", -1.0
        for seg in segments:
            v = f1(seg, q)
            if v > best_f:
                best, best_f = seg, v
        corr = f1(a, best)
        f["response_correctness"] = corr
        f["response_completeness"] = 1.0 if corr > 0.5 else 0.0
        f["response_complexity"] = depth(a)
        f["entity_diversity"] = len({t.lower() for _, _, t in entities(a)})
        f["temporal_positioning"] = sum(1 for w in aw if w in TEMPORAL or re.fullmatch(r"(19|20)[0-9]{2}", w))
        f["use_of_examples"] = has_phrase(a, EXAMPLES)

        exposure = set()
        for j in range(1, r + 1):
            exposure |= set(words(A[j]))
        f["turn_index"] = r
        f["cumulative_exposure"] = len(exposure)
        f["student_adaptation"] = 0.0 if r == 1 else depth(q) - depth(Q[r - 1])
        f["teacher_adaptation"] = 0.0 if r == 1 else depth(a) - depth(A[r - 1])
        f["information_gain"] = 1.0 if r == 1 else 1.0 - cos(ae[r], ae[r - 1])
        f["topic_shifts"] = sum(1 for j in range(2, r + 1) if cos(qe[j], qe[j - 1]) < 0.5)
        f["unanswered_queries"] = sum(1 for j in range(1, r) if f1(Q[j], A[j]) < 0.1)
        f["progressive_elaboration"] = 0.0 if r == 1 else len(aw) - len(words(A[r - 1]))

        f["lexical_diversity_student"] = ttr(q)
        f["lexical_diversity_teacher"] = ttr(a)
        f["domain_specific_terms"] = sum(1 for w in aw if w in kw)
        f["sentence_length_variability"] = sd([float(len(s)) for s in sentences(a)])
        f["readability_score"] = readability(a)
        f["passive_voice_count"] = passive(a)
        f["modal_language_count"] = sum(1 for w in aw if w in MODALS)

        f["semantic_similarity_to_summary"] = cos(ae[r], embed(lesson if lesson is not None else context))
        f["coreference_complexity"] = coref(a)
        f["semantic_cohesion"] = 0.0 if r == 1 else sum(cos(ae[r], ae[j]) for j in range(1, r)) / (r - 1)
        terms = key_terms(context)
        f["coverage_of_key_plots"] = sum(1 for t in terms if t in exposure) / len(terms) if terms else 0.0

        f["prior_knowledge_estimate"] = ACC[0]
        f["student_confidence"] = ACC[r - 1]
        f["improvement_in_questions"] = depth(q) - depth(Q[1])
        prev = set()
        for j in range(1, r):
            prev |= set(words(A[j]))
        cur = set(aw)
        f["redundancy_in_answers"] = 0.0 if r == 1 or not cur else len(cur & prev) / len(cur)
        f["politeness_social_cues"] = sum(1 for w in qw if w in POLITE) + sum(1 for w in aw if w in POLITE)
        f["meta_linguistic_feedback"] = has_phrase(a, META)
        f["learning_gain"] = ACC[r] - ACC[r - 1]
        rows.append({"round": r, "features": {k: float(v) for k, v in f.items()}})

    json.dump({"run_id": events[0]["run_id"], "rows": rows}, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
