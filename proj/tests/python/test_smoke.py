"""Smoke tests for the Python extension module."""

import math
import os
import subprocess
import sys

module_dir = os.environ.get("EMBEDKIT_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

import _embedkit as ek  # noqa: E402

SENTENCES = None


def topic_sentences():
    global SENTENCES
    if SENTENCES is None:
        import random

        random.seed(11)
        letters = "abcdefghij"
        words = [
            f"q{letters[b]}{letters[i]}word" for b in range(3) for i in range(10)
        ]
        SENTENCES = []
        for _ in range(600):
            b = random.randrange(3)
            SENTENCES.append(
                [random.choice(words[b * 10 : (b + 1) * 10]) for _ in range(12)]
            )
    return SENTENCES


def test_clean_text():
    # Symbol replacement runs before noise stripping, so the dots inside
    # the address split it and the letter fragments survive as tokens.
    sentences = ek.clean_text(
        "Hello <b>world</b> 123 a@b.com!\nvisit example now.",
        drop_foreign_script=False,
    )
    assert sentences == [["hello", "world", "com"], ["visit", "example", "now"]]
    stripped = ek.clean_text("mail a@b.com now", strip_emails_urls=True,
                             drop_foreign_script=False)
    assert stripped == [["mail", "com", "now"]]


def test_clean_text_drops_basic_latin():
    sentences = ek.clean_text("Hello سندھ")
    assert sentences == [["سندھ"]]


def test_char_ngrams():
    grams = ek.char_ngrams("ab", 3, 6)
    assert grams == ["<ab", "ab>", "<ab>"]


def test_word_frequencies_and_zipf():
    rows = ek.word_frequencies([["a", "b", "a"], ["a", "c"]])
    assert rows[0] == ("a", 3, 0.6)
    fit = ek.zipf_fit([["w%d" % i] * (2 ** (8 - i)) for i in range(8)])
    assert fit["n_ranks"] == 8
    letters = ek.letter_frequencies([["aab"]])
    assert letters[0][:2] == ("a", 2)
    cands = ek.stopword_candidates([["the", "the", "cat"]], top_k=1)
    assert cands[0][0] == "the"


def test_cosine_and_spearman():
    assert abs(ek.cosine([1, 2, 3], [4, 5, 6]) - 0.974632) < 1e-6
    assert abs(ek.spearman([2, 1, 4, 3, 5], [1, 2, 3, 4, 5]) - 0.8) < 1e-12
    assert ek.spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]) is None


def test_train_and_neighbors():
    emb, losses = ek.train(
        topic_sentences(),
        model="sg",
        dim=16,
        epochs=2,
        lr=0.05,
        ws=3,
        negatives=4,
        minw=2,
        t=0.01,
        maxn=0,
        seed=7,
    )
    assert len(losses) == 2
    assert len(emb) > 0
    assert emb.dim == 16
    assert "qaaword" in emb
    nn = ek.neighbors(emb, "qaaword", k=5)
    assert len(nn) == 5
    # Same-block words should dominate the neighbor list.
    same_block = sum(1 for token, _ in nn if token.startswith("qa"))
    assert same_block >= 3
    vec = emb.vector("qaaword")
    assert len(vec) == 16
    assert all(math.isfinite(v) for v in vec)


def test_train_glove_and_save_load(tmp_path):
    emb, losses = ek.train(
        topic_sentences(), model="glove", dim=8, epochs=10, lr=0.05, minw=2
    )
    assert losses[0] > losses[-1]
    path = str(tmp_path / "vec.txt")
    ek.save_vectors(path, emb)
    back = ek.load_vectors(path)
    assert back.tokens == emb.tokens
    assert back.vector(emb.tokens[0]) == emb.vector(emb.tokens[0])


def test_wordsim(tmp_path):
    emb, _ = ek.train(
        topic_sentences(), model="cbow", dim=16, epochs=3, lr=0.05,
        ws=3, minw=2, t=0.01, maxn=0, seed=3,
    )
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text(
        "# toy pairs\n"
        "qaaword\tqabword\t9.0\n"
        "qaaword\tqbbword\t2.0\n"
        "qcaword\tqccword\t8.0\n"
        "qcaword\tqbaword\t1.0\n"
        "!skipped\tpair\t5.0\n"
        "qaaword\tnotinvocab\t5.0\n"
    )
    report = ek.wordsim(emb, str(pairs))
    assert report["n_scored"] == 4
    assert report["n_oov_pairs"] == 1
    assert report["rho"] is not None


def test_project_words():
    emb, _ = ek.train(
        topic_sentences(), model="sg", dim=16, epochs=2, lr=0.05,
        ws=3, negatives=4, minw=2, t=0.01, maxn=0, seed=5,
    )
    rows, kl = ek.project_words(
        emb, ["qaaword", "qbaword"], k=4, iterations=400, seed=9
    )
    assert 2 <= len(rows) <= 10
    assert kl >= 0.0
    for token, group, x, y in rows:
        assert group in ("qaaword", "qbaword")
        assert math.isfinite(x) and math.isfinite(y)


def test_errors():
    try:
        ek.train([["only", "one", "each"]], minw=5)
        raise AssertionError("expected DataError")
    except ek.DataError:
        pass


def test_cli_available():
    cli = os.environ.get("EMBEDKIT_CLI")
    if not cli:
        return
    out = subprocess.run([cli, "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for sub in ("clean", "stats", "train", "eval", "project"):
        assert sub in out.stdout
    # --help lists flags with their defaults
    train_help = subprocess.run([cli, "train", "--help"],
                                capture_output=True, text=True).stdout
    for flag, default in (("--dim", "300"), ("--epochs", "40"),
                          ("--lr", "0.25"), ("--ws", "7"),
                          ("--negatives", "20"), ("--minw", "4"),
                          ("--minn", "2"), ("--maxn", "7")):
        assert flag in train_help
        assert default in train_help


def test_cli_stats_and_project(tmp_path):
    cli = os.environ.get("EMBEDKIT_CLI")
    if not cli:
        return
    corpus = tmp_path / "corpus.txt"
    corpus.write_text(
        "\n".join(" ".join(s) for s in topic_sentences()) + "\n",
        encoding="utf-8",
    )

    def run(*args):
        result = subprocess.run([cli, *args], capture_output=True, text=True)
        assert result.returncode == 0, result.stderr
        return result.stdout

    out_dir = tmp_path / "reports"
    run("stats", "--corpus", str(corpus), "--out-dir", str(out_dir),
        "--top-k", "5")
    for name in ("letters.tsv", "words.tsv", "lengths.tsv", "zipf.json",
                 "stopword_candidates.tsv"):
        assert (out_dir / name).stat().st_size > 0
    import json

    zipf = json.loads((out_dir / "zipf.json").read_text())
    assert set(zipf) == {"a", "b", "r_squared", "n_ranks"}
    candidates = (out_dir / "stopword_candidates.tsv").read_text().splitlines()
    assert len(candidates) == 1 + 5  # header plus requested top-k

    vectors = tmp_path / "vec.txt"
    run("train", "--corpus", str(corpus), "--output", str(vectors),
        "--model", "cbow", "--dim", "12", "--epochs", "2", "--minw", "2",
        "--t", "0.01", "--ws", "3", "--maxn", "0", "--lr", "0.05",
        "--save-vocab", str(tmp_path / "vocab.tsv"))
    assert (tmp_path / "vocab.tsv").stat().st_size > 0

    coords = tmp_path / "coords.tsv"
    run("project", "--vectors", str(vectors), "--out", str(coords),
        "--k", "4", "--iterations", "400", "qaaword", "qbaword")
    rows = coords.read_text().strip().splitlines()
    assert 2 <= len(rows) <= 10
    assert all(len(r.split("\t")) == 4 for r in rows)

    # fixed seed: identical coordinates on rerun
    coords2 = tmp_path / "coords2.tsv"
    run("project", "--vectors", str(vectors), "--out", str(coords2),
        "--k", "4", "--iterations", "400", "qaaword", "qbaword")
    assert coords.read_bytes() == coords2.read_bytes()


def test_cli_exit_codes(tmp_path):
    cli = os.environ.get("EMBEDKIT_CLI")
    if not cli:
        return
    missing = subprocess.run(
        [cli, "clean", str(tmp_path / "nope.txt"), "--out",
         str(tmp_path / "o.txt")],
        capture_output=True, text=True)
    assert missing.returncode == 2
    assert "nope.txt" in missing.stderr

    usage = subprocess.run([cli, "frobnicate"], capture_output=True, text=True)
    assert usage.returncode == 1

    bad_pairs = tmp_path / "bad.tsv"
    bad_pairs.write_text("cat\tdog\t7.5\nnot a pair line\n")
    vec = tmp_path / "v.txt"
    vec.write_text("2 2\ncat 1.0 0.0\ndog 0.5 0.5\n")
    malformed = subprocess.run(
        [cli, "eval", "wordsim", "--vectors", str(vec), "--pairs",
         str(bad_pairs)],
        capture_output=True, text=True)
    assert malformed.returncode == 2
    assert "line 2" in malformed.stderr
