"""Regenerates the crafted prediction fixtures.

predictions.jsonl: six systems on three tasks, six examples each. ETLCH-100
against Qwen2.5-7B wins ROUGE-L and cosine but loses parse rate on JSON
extraction (2/3), and wins ROUGE-L but loses cosine on KGE (1/2). Against
Llama-3.1-8B it wins all three JSON metrics (3/3).

gating/: one NER comparison whose cosine scores come from embedding pairs
chosen so that the paired t-test lands at p = 0.053.
"""

import json
import math
from pathlib import Path

from scipy import stats

HERE = Path(__file__).parent
IDS = [f"e{i:02d}" for i in range(1, 7)]

JSON_REFS = [
    {"作者": ["王小明"], "年份": [2021], "機構": ["臺灣大學"]},
    {"作者": ["陳美玲", "林志強"], "年份": [2019], "機構": ["清華大學"]},
    {"作者": ["張家豪"], "年份": [2023], "機構": ["成功大學"]},
    {"作者": ["李佳穎"], "年份": [2020], "機構": ["交通大學"]},
    {"作者": ["黃建國", "吳淑芬"], "年份": [2018], "機構": ["政治大學"]},
    {"作者": ["劉育成"], "年份": [2022], "機構": ["中央研究院"]},
]

KGE_REFS = [
    ["王小明－任職於－臺灣大學", "王小明－研究－量子計算", "臺灣大學－位於－臺北"],
    ["陳美玲－合作－林志強", "陳美玲－任職於－清華大學", "清華大學－位於－新竹"],
    ["張家豪－發表－深度學習論文", "深度學習論文－刊登於－學術期刊", "張家豪－任職於－成功大學"],
    ["李佳穎－指導－研究生", "李佳穎－任職於－交通大學", "交通大學－位於－新竹"],
    ["黃建國－創立－實驗室", "實驗室－隸屬於－政治大學", "吳淑芬－加入－實驗室"],
    ["劉育成－獲得－研究獎", "劉育成－任職於－中央研究院", "中央研究院－位於－臺北"],
]

NER_REFS = [
    {"人名": ["王小明"], "機構": ["臺灣大學"], "地名": ["臺北"]},
    {"人名": ["陳美玲", "林志強"], "機構": ["清華大學"], "地名": ["新竹"]},
    {"人名": ["張家豪"], "機構": ["成功大學"], "地名": ["臺南"]},
    {"人名": ["李佳穎"], "機構": ["交通大學"], "地名": ["新竹"]},
    {"人名": ["黃建國", "吳淑芬"], "機構": ["政治大學"], "地名": ["臺北"]},
    {"人名": ["劉育成"], "機構": ["中央研究院"], "地名": ["臺北"]},
]

SIZES = [100, 300, 500, 1000]


def dump(obj):
    return json.dumps(obj, ensure_ascii=False)


def record(ex, task, model, size, output, reference):
    rec = {"example_id": ex, "task": task, "model": model}
    if size is not None:
        rec["train_size"] = size
    rec["output_text"] = output
    rec["reference_text"] = reference
    return rec


def etlch_json(i, size, ref):
    text = dump(ref)
    # the smallest model truncates two outputs; larger ones truncate fewer
    broken = {100: 2, 300: 1, 500: 0, 1000: 0}[size]
    if i < broken:
        return text[:-1]
    if size == 100 and i == 5:
        return dump({k: v for k, v in ref.items() if k != "機構"})
    return text


def etlch_kge(i, size, lines):
    keep = {100: 2, 300: 2, 500: 3, 1000: 3}[size]
    if size == 100:
        keep = 2 if i % 2 == 0 else 1
    return "\n".join(lines[:keep])


def etlch_ner(i, size, ref):
    if size == 100 and i % 3 == 0:
        return dump({"人名": ref["人名"]})
    return dump(ref)


def main_fixture():
    rows = []
    for i, ex in enumerate(IDS):
        jref, kref, nref = dump(JSON_REFS[i]), "\n".join(KGE_REFS[i]), dump(NER_REFS[i])
        for size in SIZES:
            m = f"ETLCH-{size}"
            rows.append(record(ex, "json-extract", m, size, etlch_json(i, size, JSON_REFS[i]), jref))
            rows.append(record(ex, "kge", m, size, etlch_kge(i, size, KGE_REFS[i]), kref))
            rows.append(record(ex, "ner", m, size, etlch_ner(i, size, NER_REFS[i]), nref))
        # parses every time but says little
        rows.append(record(ex, "json-extract", "Qwen2.5-7B", None, dump({"作者": []}), jref))
        # same characters as the reference in reverse: full cosine, tiny LCS
        rows.append(record(ex, "kge", "Qwen2.5-7B", None, kref.replace("\n", "")[::-1], kref))
        rows.append(record(ex, "ner", "Qwen2.5-7B", None, dump({"人名": NER_REFS[i]["人名"][:1]}), nref))
        rows.append(record(ex, "json-extract", "Llama-3.1-8B", None, "抱歉，我無法回答。", jref))
        rows.append(record(ex, "kge", "Llama-3.1-8B", None, "無法建構。", kref))
        rows.append(record(ex, "ner", "Llama-3.1-8B", None, "抱歉。", nref))
    with open(HERE / "predictions.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(dump(r) + "\n")


def rust_cosine(a, b):
    dot = na = nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    return max(-1.0, min(1.0, dot / (math.sqrt(na) * math.sqrt(nb))))


def gating_fixture(n=12, target_p=0.053):
    z = [((i * 7) % n - (n - 1) / 2) for i in range(n)]
    mz = sum(z) / n
    sz = math.sqrt(sum((v - mz) ** 2 for v in z) / (n - 1))
    z = [(v - mz) / sz for v in z]
    s = 0.04
    t_star = stats.t.isf(target_p / 2, n - 1)
    m = t_star * s / math.sqrt(n)
    base = [0.60 + 0.01 * (i % 3) for i in range(n)]
    subj = [b + m + s * zi for b, zi in zip(base, z)]
    out_dir = HERE / "gating"
    out_dir.mkdir(exist_ok=True)
    preds, embs, cos = [], [], {"subject": [], "baseline": []}
    for i in range(n):
        ex = f"g{i:02d}"
        ref = dump({"人名": [f"人物{i}"]})
        for role, model, size, c in [("subject", "ETLCH-300", 300, subj[i]), ("baseline", "Llama-3.1-8B", None, base[i])]:
            preds.append(record(ex, "ner", model, size, dump({"人名": [f"某人{i}"]}), ref))
            cand = [c, math.sqrt(1.0 - c * c)]
            e = {"example_id": ex, "task": "ner", "model": model}
            if size is not None:
                e["train_size"] = size
            e["candidate"] = cand
            e["reference"] = [1.0, 0.0]
            embs.append(e)
            cos[role].append(rust_cosine(cand, [1.0, 0.0]))
    with open(out_dir / "predictions.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for r in preds:
            f.write(dump(r) + "\n")
    with open(out_dir / "embeddings.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for e in embs:
            f.write(json.dumps(e) + "\n")
    res = stats.ttest_rel(cos["subject"], cos["baseline"])
    print(f"gating paired-t: t={res.statistic!r} p={res.pvalue!r}")


if __name__ == "__main__":
    main_fixture()
    gating_fixture()
