#!/usr/bin/env python3
# Copyright 2026 The Hanforge Authors.
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
"""Generates the bundled synthetic mini-corpora.

Sentences come from a small template grammar, so every file is fully
consistent: the two CWS files hold the same sentences at coarse and fine
granularity, and the POS, NER and DEP files share the coarse segmentation.
"""

import argparse
import json
import os
import random

PRONOUNS = ["我", "你", "他", "她", "我们", "他们", "大家"]
PERSONS = ["张伟", "李娜", "王小明", "刘洋", "陈静", "赵磊", "周杰", "吴敏", "孙丽", "黄海"]
# (coarse word, fine split) for compounds; plain words split into themselves.
LOCATIONS = [("北京", None), ("上海", None), ("广州", None), ("深圳", None), ("杭州", None),
             ("成都", None), ("武汉", None), ("西安", None),
             ("南京市", ("南京", "市")), ("长江大桥", ("长江", "大桥")),
             ("天安门广场", ("天安门", "广场")), ("西湖公园", ("西湖", "公园"))]
ORGS = [("北京大学", ("北京", "大学")), ("清华大学", ("清华", "大学")),
        ("复旦大学", ("复旦", "大学")), ("人民医院", ("人民", "医院")),
        ("中国银行", ("中国", "银行")), ("科学院", ("科学", "院"))]
PLACES = [("足球场", ("足球", "场")), ("图书馆", ("图书", "馆")), ("电影院", ("电影", "院")),
          ("火车站", ("火车", "站")), ("博物馆", ("博物", "馆")), ("办公室", ("办公", "室")),
          ("学校", None), ("公园", None), ("家里", None), ("商店", None)]
OBJECTS = [("足球", None), ("篮球", None), ("苹果", None), ("电影", None), ("音乐", None),
           ("小说", None), ("汉字", None), ("咖啡", None), ("面条", None), ("衣服", None),
           ("报纸", None), ("绿茶", None), ("电脑", None), ("自行车", None),
           ("中文书", ("中文", "书")), ("羽毛球", ("羽毛", "球")), ("牛肉面", ("牛肉", "面"))]
VERBS = ["踢", "看", "吃", "买", "学习", "写", "听", "打", "喝", "参观", "访问", "喜欢", "修",
         "读", "卖"]
ADVERBS = ["经常", "都", "也", "常常", "已经", "每天"]
ADJECTIVES = ["新", "旧", "大", "小", "好", "漂亮"]
ROLES = ["学生", "老师", "医生", "经理", "教授"]


def word(entry):
  return entry if isinstance(entry, str) else entry[0]


def fine(entry):
  if isinstance(entry, str) or entry[1] is None:
    return [word(entry)]
  return list(entry[1])


class Builder:
  """Accumulates one sentence as tokens with POS, NER, head and relation."""

  def __init__(self):
    self.tokens = []  # dicts: form, fine, pos, ent, head, rel

  def add(self, entry, pos, ent=None):
    self.tokens.append({"form": word(entry), "fine": fine(entry), "pos": pos, "ent": ent,
                        "head": 0, "rel": ""})
    return len(self.tokens)  # 1-based id

  def arc(self, dep, head, rel):
    self.tokens[dep - 1]["head"] = head
    self.tokens[dep - 1]["rel"] = rel


def subject(b, rng):
  if rng.random() < 0.5:
    return b.add(rng.choice(PRONOUNS), "PN")
  return b.add(rng.choice(PERSONS), "NR", "PER")


def obj(b, rng):
  return b.add(rng.choice(OBJECTS), "NN")


def sentence(rng):
  b = Builder()
  kind = rng.randrange(6)
  if kind == 0:  # SUBJ [AD] VV OBJ
    s = subject(b, rng)
    a = b.add(rng.choice(ADVERBS), "AD") if rng.random() < 0.4 else None
    v = b.add(rng.choice(VERBS), "VV")
    o = obj(b, rng)
    b.arc(s, v, "nsubj"); b.arc(v, 0, "root"); b.arc(o, v, "dobj")
    if a: b.arc(a, v, "advmod")
  elif kind == 1:  # SUBJ [AD] 喜欢 VV OBJ
    s = subject(b, rng)
    a = b.add(rng.choice(ADVERBS), "AD") if rng.random() < 0.4 else None
    m = b.add("喜欢", "VV")
    v = b.add(rng.choice(VERBS[:-4]), "VV")
    o = obj(b, rng)
    b.arc(s, m, "nsubj"); b.arc(m, 0, "root"); b.arc(v, m, "ccomp"); b.arc(o, v, "dobj")
    if a: b.arc(a, m, "advmod")
  elif kind == 2:  # SUBJ 在 PLACE VV OBJ
    s = subject(b, rng)
    p = b.add("在", "P")
    if rng.random() < 0.5:
      l = b.add(rng.choice(LOCATIONS), "NR", "LOC")
    else:
      l = b.add(rng.choice(PLACES), "NN")
    v = b.add(rng.choice(VERBS), "VV")
    o = obj(b, rng)
    b.arc(s, v, "nsubj"); b.arc(p, v, "prep"); b.arc(l, p, "pobj"); b.arc(v, 0, "root")
    b.arc(o, v, "dobj")
  elif kind == 3:  # SUBJ VV JJ 的 OBJ
    s = subject(b, rng)
    v = b.add(rng.choice(VERBS), "VV")
    j = b.add(rng.choice(ADJECTIVES), "JJ")
    d = b.add("的", "DEG")
    o = obj(b, rng)
    b.arc(s, v, "nsubj"); b.arc(v, 0, "root"); b.arc(j, o, "amod"); b.arc(d, j, "assm")
    b.arc(o, v, "dobj")
  elif kind == 4:  # PER 是 ORG 的 ROLE
    s = b.add(rng.choice(PERSONS), "NR", "PER")
    c = b.add("是", "VC")
    g = b.add(rng.choice(ORGS), "NR", "ORG")
    d = b.add("的", "DEG")
    r = b.add(rng.choice(ROLES), "NN")
    b.arc(s, c, "nsubj"); b.arc(c, 0, "root"); b.arc(g, r, "assmod"); b.arc(d, g, "assm")
    b.arc(r, c, "attr")
  else:  # SUBJ 去 LOC|ORG VV OBJ
    s = subject(b, rng)
    q = b.add("去", "VV")
    if rng.random() < 0.5:
      l = b.add(rng.choice(LOCATIONS), "NR", "LOC")
    else:
      l = b.add(rng.choice(ORGS), "NR", "ORG")
    v = b.add(rng.choice(VERBS), "VV")
    o = obj(b, rng)
    b.arc(s, q, "nsubj"); b.arc(q, 0, "root"); b.arc(l, q, "dobj"); b.arc(v, q, "conj")
    b.arc(o, v, "dobj")
  return b.tokens


def ner_rows(tokens):
  rows = []
  for t in tokens:
    chars = list(t["form"])
    if not t["ent"]:
      rows += [(c, "O") for c in chars]
    elif len(chars) == 1:
      rows.append((chars[0], "S-" + t["ent"]))
    else:
      rows.append((chars[0], "B-" + t["ent"]))
      rows += [(c, "M-" + t["ent"]) for c in chars[1:-1]]
      rows.append((chars[-1], "E-" + t["ent"]))
  return rows


def unique_sentences(rng, n):
  seen, out = set(), []
  while len(out) < n:
    s = sentence(rng)
    key = "".join(t["form"] for t in s)
    if key not in seen:
      seen.add(key)
      out.append(s)
  return out


def main():
  ap = argparse.ArgumentParser(description=__doc__)
  ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "mini"))
  ap.add_argument("--size", type=int, default=300)
  ap.add_argument("--seed", type=int, default=20260101)
  args = ap.parse_args()
  os.makedirs(args.out, exist_ok=True)
  rng = random.Random(args.seed)

  def path(name):
    return os.path.join(args.out, name)

  cws = unique_sentences(rng, args.size)
  with open(path("cws_coarse.txt"), "w", encoding="utf-8") as f:
    for s in cws:
      f.write(" ".join(t["form"] for t in s) + "\n")
  with open(path("cws_fine.txt"), "w", encoding="utf-8") as f:
    for s in cws:
      f.write(" ".join(w for t in s for w in t["fine"]) + "\n")

  with open(path("pos.txt"), "w", encoding="utf-8") as f:
    for s in unique_sentences(rng, args.size):
      f.write("".join(f"{t['form']}\t{t['pos']}\n" for t in s) + "\n")

  with open(path("ner.txt"), "w", encoding="utf-8") as f:
    for s in unique_sentences(rng, args.size):
      f.write("".join(f"{c}\t{l}\n" for c, l in ner_rows(s)) + "\n")

  with open(path("dep.conll"), "w", encoding="utf-8") as f:
    for s in unique_sentences(rng, args.size):
      for i, t in enumerate(s, 1):
        f.write(f"{i}\t{t['form']}\t{t['pos']}\t{t['head']}\t{t['rel']}\n")
      f.write("\n")

  config = {
      "corpora": [
          {"path": "cws_coarse.txt", "tag": "CWS-coarse", "task": "CWS"},
          {"path": "cws_fine.txt", "tag": "CWS-fine", "task": "CWS"},
          {"path": "pos.txt", "tag": "POS", "task": "POS"},
          {"path": "ner.txt", "tag": "NER", "task": "NER"},
          {"path": "dep.conll", "tag": "DEP", "task": "DEP"},
      ],
      "model": {"layers": 4, "hidden": 48, "heads": 4, "ffn": 96, "max_len": 256,
                "arc_dim": 32, "label_dim": 16},
      "epochs": 8,
      "batch_size": 16,
      "learning_rate": 0.002,
      "seed": 7,
      "eval_fraction": 0.1,
  }
  with open(path("train.json"), "w", encoding="utf-8") as f:
    json.dump(config, f, ensure_ascii=False, indent=2)
    f.write("\n")


if __name__ == "__main__":
  main()
