#!/usr/bin/env python3
"""Independent minimal reference for the synthetic cross-lingual experiments.

Implements the squared-distance energy, the margin hinge over target-side
noise, ADD composition, diagonal AdaGrad and an averaged perceptron directly
in numpy, with its own corpus generator that follows the same recipe as
src/synthetic.cpp (different RNG, so numbers are comparable only in
distribution). Used to check that the acceptance thresholds are attainable.
"""
import argparse
import numpy as np

VOCAB, TOPICS = 200, 4


def latent_sentence(rng, topic, topic_prob):
    n = rng.integers(4, 11)
    block = VOCAB // TOPICS
    out = []
    for _ in range(n):
        if rng.random() < topic_prob:
            out.append(topic * block + rng.integers(0, block))
        else:
            out.append(rng.integers(0, VOCAB))
    return out


def generate(rng, n_sent, n_docs, sents_per_doc, topic_prob):
    sents = [latent_sentence(rng, i % TOPICS, topic_prob) for i in range(n_sent)]
    def docs():
        return [([latent_sentence(rng, i % TOPICS, topic_prob) for _ in range(sents_per_doc)], i % TOPICS)
                for i in range(n_docs)]
    return sents, docs(), docs()


def train(pairs_by_sub, n_lang, d, k, m, lam, step, batch, epochs, rng, eps=1e-6):
    # pairs_by_sub: list of (src_lang, tgt_lang, list of latent sentences)
    W = [rng.normal(0.0, np.sqrt(0.1), size=(VOCAB, d)) for _ in range(n_lang)]
    G = [np.zeros((VOCAB, d)) for _ in range(n_lang)]
    losses = []
    for ep in range(epochs):
        total = 0.0
        orders = [rng.permutation(len(s[2])) for s in pairs_by_sub]
        nb = [int(np.ceil(len(o) / batch)) for o in orders]
        for bi in range(max(nb)):
            for si, (la, lb, sents) in enumerate(pairs_by_sub):
                if bi >= nb[si]:
                    continue
                grads = [dict() for _ in range(n_lang)]
                def add(l, ids, g):
                    for t in ids:
                        grads[l][t] = grads[l].get(t, 0.0) + g
                for idx in orders[si][bi * batch:(bi + 1) * batch]:
                    s = sents[idx]
                    fa = W[la][s].sum(0)
                    gb = W[lb][s].sum(0)
                    epos = np.sum((fa - gb) ** 2)
                    for _ in range(k):
                        j = idx
                        while j == idx:
                            j = rng.integers(0, len(sents))
                        n = sents[j]
                        gn = W[lb][n].sum(0)
                        h = m + epos - np.sum((fa - gn) ** 2)
                        if h > 0:
                            total += h
                            add(la, s, 2 * (gn - gb))
                            add(lb, s, -2 * (fa - gb))
                            add(lb, n, 2 * (fa - gn))
                for l in range(n_lang):
                    for t, g in grads[l].items():
                        g = g + lam * W[l][t]
                        G[l][t] += g * g
                        W[l][t] -= step * g / np.sqrt(G[l][t] + eps)
        losses.append(total)
    return W, losses


def doc_vec(W, sents):
    return np.mean([W[s].sum(0) for s in sents], axis=0)


def perceptron(X, y, C, epochs, rng):
    X = np.hstack([X, np.ones((len(X), 1))])
    w = np.zeros((C, X.shape[1]))
    acc = np.zeros_like(w)
    cnt = 0
    for _ in range(epochs):
        for i in rng.permutation(len(X)):
            p = int(np.argmax(w @ X[i]))
            if p != y[i]:
                w[y[i]] += X[i]
                w[p] -= X[i]
            acc += w
            cnt += 1
    return acc / cnt


def classify(W_train, W_test, train_docs, test_docs, rng):
    Xa = np.array([doc_vec(W_train, s) for s, _ in train_docs])
    ya = np.array([t for _, t in train_docs])
    Xb = np.array([doc_vec(W_test, s) for s, _ in test_docs])
    yb = np.array([t for _, t in test_docs])
    w = perceptron(Xa, ya, TOPICS, 10, rng)
    pred = np.argmax(np.hstack([Xb, np.ones((len(Xb), 1))]) @ w.T, axis=1)
    return float(np.mean(pred == yb))


def toy(a, rng):
    """Small-corpus convergence check: loss ratio and separation fraction."""
    sents, _, _ = generate(rng, a.sentences, 0, 1, a.topic_prob)
    d, k = a.dim, 5
    m = a.margin if a.margin is not None else float(d)
    W, losses = train([(0, 1, sents)], 2, d, k, m, a.lam, a.step, a.batch, a.epochs, rng)
    separated = 0
    for i, s in enumerate(sents):
        fa = W[0][s].sum(0)
        epos = np.sum((fa - W[1][s].sum(0)) ** 2)
        others = [j for j in rng.integers(0, len(sents), size=40) if j != i][:10]
        eneg = min(np.sum((fa - W[1][sents[j]].sum(0)) ** 2) for j in others)
        separated += epos < eneg
    print("loss first/last", losses[0], losses[-1], "ratio", losses[-1] / losses[0])
    print("separation fraction", separated / len(sents))


def main():
    global VOCAB
    ap = argparse.ArgumentParser()
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--epochs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--topic-prob", type=float, default=0.7)
    ap.add_argument("--pivot", action="store_true")
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--toy", action="store_true")
    ap.add_argument("--vocab", type=int, default=200)
    ap.add_argument("--sentences", type=int, default=50)
    ap.add_argument("--margin", type=float, default=None)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--batch", type=int, default=10)
    a = ap.parse_args()
    VOCAB = a.vocab
    rng = np.random.default_rng(a.seed)
    if a.toy:
        toy(a, rng)
        return
    sents, train_docs, test_docs = generate(rng, 500, 200, 3, a.topic_prob)
    d = a.dim
    if not a.pivot:
        W, losses = train([(0, 1, sents)], 2, d, 10, float(d), a.lam, 0.05, 10, a.epochs, rng)
        print("loss first/last", losses[0], losses[-1])
        print("A->B accuracy", classify(W[0], W[1], train_docs, test_docs, rng))
        print("B->A accuracy", classify(W[1], W[0], train_docs, test_docs, rng))
    else:
        W, losses = train([(0, 1, sents), (0, 2, sents)], 3, d, 10, float(d), a.lam, 0.05, 10, a.epochs, rng)
        print("loss first/last", losses[0], losses[-1])
        def cos(u, v):
            return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v) + 1e-300))
        trans = np.array([cos(W[1][w], W[2][w]) for w in range(VOCAB)])
        rand = np.array([cos(W[1][w], W[2][v]) for w in range(VOCAB) for v in range(VOCAB) if v != w])
        print("translation mean", trans.mean(), "random mean", rand.mean(), "random sd", rand.std(ddof=1),
              "gap/sd", (trans.mean() - rand.mean()) / rand.std(ddof=1))
        print("de->fr accuracy", classify(W[1], W[2], train_docs, test_docs, rng))


if __name__ == "__main__":
    main()
