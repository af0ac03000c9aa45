"""Command-line front end: ``compile``, ``run``, ``check`` and ``demo``.

Reports go to stdout as a ``PASS``/``FAIL`` line followed by JSON; human
summaries and timings go to stderr. Exit codes: 0 pass, 1 I/O or invalid
document, 2 invalid parameters, 3 ungroundable input, 4 failed check.
"""
import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import jsonio
from .automata import characteristic_semigroup, compose_cascade, compose_network
from .compiler import (
    NeuronChoice,
    alternation_probe,
    check_equivalence,
    check_homomorphism,
    compile_cascade,
    noisy_inputs,
    rnc_run,
)
from .errors import CapacityError, GroundingError, IntegrityError, InvalidInputError, ParameterError
from .neurons import verify_core_conditions
from .patterns import cookie, parity, ttop
from .semigroups import classify, periodic_elements

EXIT_OK, EXIT_IO, EXIT_PARAM, EXIT_GROUNDING, EXIT_FAIL = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = 500
    max_len: int = 100
    grid: int = 1000
    tol: float = 1e-12
    episodes: int = 100
    steps: int = 100
    samples: int = 10_000
    threads: int = 1

    def __post_init__(self):
        for name in ("trials", "max_len", "grid", "episodes", "steps", "samples", "threads"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"--{name.replace('_', '-')} must be positive")
        if self.seed < 0:
            raise ParameterError("--seed must be non-negative")
        if not self.tol > 0:
            raise ParameterError("--tol must be positive")


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _say(*parts):
    print(*parts, file=sys.stderr)


def _report(passed, doc):
    print("PASS" if passed else "FAIL")
    print(json.dumps(doc, indent=2))
    return EXIT_OK if passed else EXIT_FAIL


def _load(path, kinds):
    p = Path(path)
    if not p.is_file():
        raise _Exit(EXIT_IO, f"cannot read {path}")
    kind, obj = jsonio.load_any(p)
    if kind not in kinds:
        raise _Exit(EXIT_IO, f"{path}: expected a {' or '.join(kinds)} document, got {kind}")
    return kind, obj


def _choice(args):
    if args.weight is None:
        w = 2.0 if args.activation == "tanh" else 1.0
    else:
        w = args.weight
    return NeuronChoice(args.activation, w, args.a, args.b)


def _config(args, **over):
    keys = RunConfig.__dataclass_fields__
    vals = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    vals.update(over)
    return RunConfig(**vals)


# -- compile ---------------------------------------------------------------

def cmd_compile(args):
    _, spec = _load(args.cascade, ("cascade",))
    rnc = compile_cascade(spec, _choice(args))
    doc = jsonio.rnc_to_json(rnc)
    summary = {
        "neurons": len(rnc.neurons),
        "architecture": rnc.architecture,
        "components": [
            {"name": name, "kind": n.kind, "activation": n.activation, "w": n.w, "reads": list(m.reads)}
            for name, n, m in zip(rnc.names, rnc.neurons, rnc.maps)
        ],
    }
    if args.output:
        Path(args.output).write_text(jsonio.dumps(doc) + "\n")
        summary["written"] = str(args.output)
        print(json.dumps(summary, indent=2))
    else:
        print(jsonio.dumps(doc))
    _say(f"compiled {len(rnc.neurons)} neuron(s)")
    return EXIT_OK


# -- run -------------------------------------------------------------------

def parse_inputs(text, grounding):
    """Reals stay reals, letters become region midpoints.

    Tokens are split on whitespace and commas. A single token that is
    neither a letter nor a number is read character by character, so
    ``aaa`` means three ``a`` letters. Letters win over numbers when an
    alphabet uses digits.
    """
    tokens = [t for t in text.replace(",", " ").split() if t]
    letters = set(grounding.alphabet)
    if len(tokens) == 1 and tokens[0] not in letters and not _is_number(tokens[0]):
        tokens = list(tokens[0])
    out = []
    for t, tok in enumerate(tokens):
        if tok in letters:
            out.append(grounding.midpoint(tok))
        elif _is_number(tok):
            out.append(float(tok))
        else:
            raise GroundingError(f"token {tok!r} at position {t} is neither a letter nor a number", position=t)
    return out


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def cmd_run(args):
    _, rnc = _load(args.rnc, ("rnc",))
    source = args.input
    text = Path(source).read_text() if source and Path(source).is_file() else (source or "")
    us = parse_inputs(text, rnc.grounding)
    outputs, trace = rnc_run(rnc, us)
    if args.trace:
        for rec in trace.records(rnc):
            print(json.dumps(rec))
    else:
        print(" ".join(outputs))
    return EXIT_OK


# -- check -----------------------------------------------------------------

def _as_semiautomaton(kind, obj):
    if kind == "semiautomaton":
        return obj
    if kind == "automaton":
        return obj.semiautomaton
    if obj.architecture == "network":
        return compose_network(obj)
    return compose_cascade(obj)


def cmd_check(args):
    cfg = _config(args)
    subject = args.subject
    if subject == "aperiodic":
        kind, obj = _load(args.files[0], ("semiautomaton", "automaton", "cascade"))
        s = _as_semiautomaton(kind, obj)
        sg = characteristic_semigroup(s)
        bad = periodic_elements(sg)
        doc = {"subject": "aperiodic", "states": len(s.states), "elements": len(sg), "aperiodic": bad.size == 0}
        if bad.size:
            t = sg.element(int(bad[0]))
            doc["witness"] = {
                "images": {jsonio._key(s.states[q]): jsonio._state_json(s.states[t(q)]) for q in range(t.n)},
                "classification": classify(t),
            }
        return _report(bad.size == 0, doc)
    if subject == "neuron":
        _, spec = _load(args.files[0], ("neuron",))
        rep = verify_core_conditions(spec, grid=cfg.grid, tol=cfg.tol)
        return _report(rep.passed, rep.to_json())
    if subject == "homomorphism":
        if len(args.files) != 2:
            raise _Exit(EXIT_PARAM, "check homomorphism needs an rnc and a cascade or semiautomaton")
        _, rnc = _load(args.files[0], ("rnc",))
        kind, target = _load(args.files[1], ("cascade", "semiautomaton", "automaton"))
        if kind == "automaton":
            target = target.semiautomaton
        t0 = time.perf_counter()
        rep = check_homomorphism(rnc, target, samples=cfg.samples, seed=cfg.seed, threads=cfg.threads)
        _say(f"checked {rep.checked} samples in {time.perf_counter() - t0:.2f}s")
        return _report(rep.passed, rep.to_json())
    if subject == "equivalence":
        if len(args.files) != 2:
            raise _Exit(EXIT_PARAM, "check equivalence needs an rnc and an automaton or cascade")
        _, rnc = _load(args.files[0], ("rnc",))
        kind, target = _load(args.files[1], ("automaton", "cascade"))
        if kind == "cascade" and target.output is None:
            raise _Exit(EXIT_IO, "the cascade has no output function")
        t0 = time.perf_counter()
        res = check_equivalence(rnc, target, trials=cfg.trials, max_len=cfg.max_len, seed=cfg.seed)
        _say(f"{res.trials} trial(s) in {time.perf_counter() - t0:.2f}s")
        return _report(res.equivalent, res.to_json())
    raise _Exit(EXIT_PARAM, f"unknown check subject {subject!r}")


# -- demos -----------------------------------------------------------------

def _fixture_files(directory, pattern):
    files = sorted(Path(directory).glob(pattern))
    if not files:
        raise _Exit(EXIT_IO, f"no {pattern} files in {directory}")
    return files


def _agreement(name, results, extra=None):
    agreed = sum(1 for ok, _ in results if ok)
    first = next((m for ok, m in results if not ok), None)
    doc = {"demo": name, "trials": len(results), "agreed": agreed, "first_mismatch": first}
    doc.update(extra or {})
    _say(f"{name}: {agreed}/{len(results)} agree")
    return _report(agreed == len(results), doc)


def _mismatch(k, inputs, expected, got):
    t = next((i for i, (a, b) in enumerate(zip(expected, got)) if a != b), min(len(expected), len(got)))
    return {"trial": k, "step": t, "inputs": inputs,
            "expected": expected[t] if t < len(expected) else None,
            "got": got[t] if t < len(got) else None}


def demo_ttop(args, cfg):
    bits = args.bits
    spec = ttop.ttop_cascade(bits)
    t0 = time.perf_counter()
    rnc = compile_cascade(spec, _choice(args))
    _say(f"compiled {len(rnc.neurons)} neurons in {time.perf_counter() - t0:.2f}s")
    if args.fixtures:
        sequences = [jsonio.load_prices(p) for p in _fixture_files(args.fixtures, "prices_*.json")]
        sequences = [ttop.PriceSequence(s, bits).prices for s in sequences]
    else:
        rng = np.random.default_rng(cfg.seed)
        sequences = []
        for _ in range(cfg.trials):
            if bits >= 3 and rng.random() < 0.5:
                sequences.append(ttop.planted_prices(rng, bits, cfg.max_len).prices)
            else:
                sequences.append(ttop.random_prices(rng, bits, cfg.max_len).prices)
    if args.emit:
        Path(args.emit).mkdir(parents=True, exist_ok=True)
        for k, s in enumerate(sequences):
            jsonio.save_prices(s, Path(args.emit) / f"prices_{k:04d}.json")
    results = []
    t0 = time.perf_counter()
    for k, prices in enumerate(sequences):
        expected = [str(y) for y in ttop.ttop_reference(prices)]
        got, _ = rnc_run(rnc, rnc.grounding.realise([str(p) for p in prices]))
        results.append((got == expected, None if got == expected else _mismatch(k, list(prices), expected, got)))
    _say(f"ran {len(sequences)} sequences in {time.perf_counter() - t0:.2f}s")
    positives = sum(1 for p in sequences if any(ttop.ttop_reference(p)))
    return _agreement("ttop", results, {"bits": bits, "neurons": len(rnc.neurons), "with_ttop": positives})


def demo_cookie(args, cfg):
    spec = cookie.cookie_cascade()
    rnc = compile_cascade(spec, _choice(args))
    if args.fixtures:
        episodes = [jsonio.load_episode(p) for p in _fixture_files(args.fixtures, "cookie_episode_*.jsonl")]
    else:
        episodes = [cookie.simulate_episode(cfg.seed + k, cfg.steps) for k in range(cfg.episodes)]
    if args.emit:
        Path(args.emit).mkdir(parents=True, exist_ok=True)
        for k, ep in enumerate(episodes):
            jsonio.save_episode(ep, Path(args.emit) / f"cookie_episode_{k:04d}.jsonl")
    results = []
    for k, ep in enumerate(episodes):
        expected = [float(p) for p in cookie.cookie_probabilities(ep)]
        letters = [o.letter for o in ep]
        got, _ = rnc_run(rnc, rnc.grounding.realise(letters))
        got = [float(y) for y in got]
        results.append((got == expected, None if got == expected else _mismatch(k, letters, expected, got)))
    return _agreement("cookie", results, {"steps": sum(len(e) for e in episodes)})


def demo_parity(args, cfg):
    automaton, spec = parity.parity_spec()
    choice = _choice(args)
    rnc = compile_cascade(spec, NeuronChoice(choice.activation, -abs(choice.w), choice.a, choice.b))
    rng = np.random.default_rng(cfg.seed)
    results = []
    for k in range(cfg.max_len + 1):
        word = "a" * k
        expected = automaton.run(word)
        got, _ = rnc_run(rnc, noisy_inputs(rng, rnc.grounding, np.zeros(k, dtype=np.int64)))
        results.append((got == expected, None if got == expected else _mismatch(k, k, expected, got)))
    alternates = alternation_probe(rnc, cfg.max_len)
    results.append((alternates, None if alternates else {"probe": "alternation"}))
    return _agreement("parity", results, {"max_len": cfg.max_len, "alternates": alternates})


def cmd_demo(args):
    over = {}
    if args.name == "parity" and args.max_len is None:
        over["max_len"] = 1000
    if args.name == "ttop":
        over["trials"] = 200 if args.trials is None else args.trials
        over["max_len"] = 40 if args.max_len is None else args.max_len
    cfg = _config(args, **over)
    t0 = time.perf_counter()
    code = {"ttop": demo_ttop, "cookie": demo_cookie, "parity": demo_parity}[args.name](args, cfg)
    _say(f"demo {args.name} took {time.perf_counter() - t0:.2f}s")
    return code


# -- entry point -----------------------------------------------------------

def _neuron_flags(p):
    p.add_argument("--activation", choices=("sign", "tanh", "synthetic"), default="tanh")
    p.add_argument("--weight", type=float, help="neuron weight (default 2 for tanh, 1 for sign)")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)


def _run_flags(p):
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--max-len", dest="max_len", type=int)
    p.add_argument("--threads", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="neurocascade", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a cascade.json into an rnc.json")
    p.add_argument("cascade")
    _neuron_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="run an RNC on reals or letters")
    p.add_argument("rnc")
    p.add_argument("input", nargs="?", default="", help="input text, or a file holding it")
    p.add_argument("--trace", action="store_true", help="print a JSON-lines state trace")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="aperiodicity, neuron conditions, homomorphism or equivalence")
    p.add_argument("subject", choices=("aperiodic", "neuron", "homomorphism", "equivalence"))
    p.add_argument("files", nargs="+")
    _run_flags(p)
    p.add_argument("--grid", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("demo", help="oracle agreement for the worked constructions")
    p.add_argument("name", choices=("ttop", "cookie", "parity"))
    _neuron_flags(p)
    _run_flags(p)
    p.add_argument("--bits", type=int, default=4)
    p.add_argument("--episodes", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--fixtures", help="read prices_*.json / cookie_episode_*.jsonl from this directory")
    p.add_argument("--emit", help="write the generated fixtures to this directory")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as e:
        _say(f"error: {e}")
        return e.code
    except ParameterError as e:
        _say(f"error: {e}")
        return EXIT_PARAM
    except GroundingError as e:
        _say(f"error: {e}")
        return EXIT_GROUNDING
    except IntegrityError as e:
        _say(f"error: {e}")
        return EXIT_FAIL
    except (InvalidInputError, CapacityError, OSError) as e:
        _say(f"error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
