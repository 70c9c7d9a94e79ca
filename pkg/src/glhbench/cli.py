"""Command-line front door: ``glhbench build|prep|decide|verify|gauss-energy``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage, parse or cap errors.  Reports are JSON with sorted keys; everything
except the ``timing`` field is a deterministic function of the arguments.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from glhbench.config import CAP_ENV_VAR, DEFAULT, Config, from_env
from glhbench.errors import GLHError, SizeError, UnsupportedError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _config(args) -> Config:
    cfg = from_env(DEFAULT)
    if args.cap_qubits is not None:
        if args.cap_qubits < 1:
            raise UsageError("--cap-qubits must be positive")
        cfg = dataclasses.replace(cfg, qubit_cap=args.cap_qubits)
    return cfg


# ------------------------------------------------------------------ build


def cmd_build(args, cfg: Config) -> tuple[dict, int]:
    from glhbench.feynman_kitaev import (
        RSetDescription,
        build_fk,
        circuit_from_json,
        circuit_to_json,
        history_state,
        nullity_residual,
        output_energy,
        pre_idle,
        r_fidelity_closed_form,
        r_state,
        subset_sparse,
        yes_no_thresholds,
    )
    from glhbench.guiding_states import state_to_json
    from glhbench.operator_core import fidelity, hamiltonian_to_json

    c = pre_idle(circuit_from_json(_read_json(args.circuit)), args.pre_idle)
    K = c.K
    delta = args.delta if args.delta is not None else 1e3 * K ** 3
    inst = build_fk(c, args.encoding, delta, cfg=cfg)
    if inst.n > cfg.qubit_cap:
        raise SizeError(f"compiled register of {inst.n} qubits exceeds the cap {cfg.qubit_cap}")
    eta = history_state(c, inst.encoding, sparse=True)
    null = nullity_residual(inst, eta)
    out_err = abs(output_energy(inst, eta) * (K + 1) + c.acceptance_probability() - 1)
    thr = yes_no_thresholds(K, delta, args.eps)
    summary = {
        "n_qubits": inst.n,
        "K": K,
        "T": c.T,
        "N": args.pre_idle,
        "encoding": inst.encoding.kind,
        "delta": delta,
        "terms": len(inst.hamiltonian().terms),
        "nullity_residual": null,
        "output_identity_error": out_err,
        "acceptance_probability": c.acceptance_probability(),
        "thresholds": dataclasses.asdict(thr),
    }
    ok = null <= 1e-10 and out_err <= 1e-10
    guide = None
    if args.pre_idle >= 1:
        guide = r_state(RSetDescription(c.start_bits, args.pre_idle, inst.encoding))
        F = fidelity(subset_sparse(guide), eta)
        summary["fidelity"] = {"measured": F, "closed_form": r_fidelity_closed_form(args.pre_idle, c.T)}
        ok = ok and abs(F - summary["fidelity"]["closed_form"]) <= 1e-12
    else:
        summary["fidelity"] = "no pre-idle"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        meta = {"a": thr.a, "b": thr.b, "overlap": r_fidelity_closed_form(args.pre_idle, c.T) if guide else None,
                "K": K, "delta": delta, "encoding": inst.encoding.kind, "acceptance": c.acceptance_probability()}
        (out / "instance.json").write_text(dumps({"hamiltonian": hamiltonian_to_json(inst.hamiltonian()),
                                                 "metadata": meta, "circuit": circuit_to_json(c)}))
        if guide is not None:
            (out / "guide.json").write_text(dumps(state_to_json(guide)))
        summary["written"] = sorted(p.name for p in out.iterdir() if p.name in ("instance.json", "guide.json"))
    return summary, EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------- prep


def cmd_prep(args, cfg: Config) -> tuple[dict, int]:
    from glhbench.guiding_states import (
        EncodedSubsetState,
        FixedWeightState,
        SubsetState,
        description_size,
        realize_dense,
        state_from_json,
    )
    from glhbench.state_prep import synth_scess, synth_subset_state, verify_prep

    g = state_from_json(_read_json(args.state))
    target = g.as_subset() if isinstance(g, FixedWeightState) else g
    if isinstance(target, SubsetState):
        sc = synth_subset_state(target)
    elif isinstance(target, EncodedSubsetState):
        sc = synth_scess(target)
    else:
        vec = realize_dense(g, cfg)
        return {
            "family": type(g).__name__,
            "synthesized": False,
            "message": f"unsupported: no circuit synthesis for {type(g).__name__}; dense verification only",
            "dense_norm": float(np.linalg.norm(vec)),
            "description_bits": description_size(g),
        }, EXIT_OK
    rep = verify_prep(sc, realize_dense(target, cfg))
    ok = rep.infidelity <= 1e-7 and rep.ancilla_purity >= 1 - 1e-10
    return {
        "family": type(g).__name__,
        "synthesized": True,
        "circuit": sc.to_text().splitlines(),
        "n_qubits": sc.n_qubits,
        "verification": dataclasses.asdict(rep),
    }, EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------- decide


def cmd_decide(args, cfg: Config) -> tuple[dict, int]:
    from glhbench.dequantizer import decide_classical
    from glhbench.energy_estimation import decide_glh
    from glhbench.guiding_states import state_from_json
    from glhbench.operator_core import hamiltonian_from_json

    obj = _read_json(args.instance)
    meta = obj.get("metadata", {}) if "hamiltonian" in obj else {}
    H = hamiltonian_from_json(obj["hamiltonian"] if "hamiltonian" in obj else obj)
    g = state_from_json(_read_json(args.guide))
    warnings = []
    a = args.a if args.a is not None else meta.get("a")
    b = args.b if args.b is not None else meta.get("b")
    if a is None or b is None:
        raise UsageError("thresholds missing: give --a and --b or instance metadata")
    overlap = args.overlap if args.overlap is not None else meta.get("overlap")
    if overlap is None:
        warnings.append("overlap promise missing from metadata; using 0.5")
        overlap = 0.5
    if "a" not in meta or "b" not in meta:
        warnings.append("promise metadata missing; thresholds taken from flags")
    seed = args.seed
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    reports = {}
    if args.route in ("qpe", "both"):
        reports["qpe"] = decide_glh(H, g, a, b, eta=args.eta, delta=overlap, seed=seed, rng=rng, cfg=cfg).to_dict()
    if args.route in ("classical", "both"):
        reports["classical"] = decide_classical(H, g, a, b, overlap, cfg=cfg).to_dict()
    out = {"route": args.route, "a": a, "b": b, "overlap": overlap, "reports": reports, "warnings": warnings}
    code = EXIT_OK
    if args.route == "both":
        agree = reports["qpe"]["decision"] == reports["classical"]["decision"]
        out["agreement"] = agree
        code = EXIT_OK if agree else EXIT_FAIL
    return out, code


# ----------------------------------------------------------------- verify


def cmd_verify(args, cfg: Config) -> tuple[dict, int]:
    from glhbench.suites import SUITES, run_suite

    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    res = run_suite(args.suite, args.seed)
    return res.to_dict(), EXIT_OK if res.passed else EXIT_FAIL


# ----------------------------------------------------------- gauss-energy


def cmd_gauss_energy(args, cfg: Config) -> tuple[dict, int]:
    from glhbench.fermionic_gaussian import covariance_from_json, gaussian_energy, gaussian_statevector
    from glhbench.operator_core import apply, hamiltonian_from_json

    M = covariance_from_json(_read_json(args.covariance))
    H = hamiltonian_from_json(_read_json(args.hamiltonian))
    E = gaussian_energy(M, H)
    out = {"energy": E, "modes": M.shape[0] // 2}
    code = EXIT_OK
    if args.check:
        psi = gaussian_statevector(M)
        dense = float(np.real(np.vdot(psi, apply(H, psi))))
        out["dense_energy"] = dense
        out["error"] = abs(E - dense)
        code = EXIT_OK if out["error"] <= 1e-8 else EXIT_FAIL
    return out, code


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed (recorded in the report)")
    common.add_argument("--cap-qubits", type=int, default=None,
                        help=f"qubit cap (default from {CAP_ENV_VAR} or {DEFAULT.qubit_cap})")
    common.add_argument("--out", default=None, help="output directory (build) or report file")
    p = _Parser(prog="glhbench", description="Guided local Hamiltonian toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="compile a circuit to a clock Hamiltonian")
    b.add_argument("circuit")
    b.add_argument("--encoding", choices=("unary", "one_hot"), default="unary")
    b.add_argument("--delta", type=float, default=None, help="penalty strength (default 1e3 K^3)")
    b.add_argument("--pre-idle", type=int, default=0)
    b.add_argument("--eps", type=float, default=0.0, help="completeness/soundness slack")

    pr = sub.add_parser("prep", parents=[common], help="synthesize and verify a guiding-state circuit")
    pr.add_argument("state")

    d = sub.add_parser("decide", parents=[common], help="decide an instance by QPE, filtering or both")
    d.add_argument("instance")
    d.add_argument("guide")
    d.add_argument("--route", choices=("qpe", "classical", "both"), default="qpe")
    d.add_argument("--a", type=float, default=None)
    d.add_argument("--b", type=float, default=None)
    d.add_argument("--overlap", type=float, default=None, help="promised ground-state overlap")
    d.add_argument("--eta", type=float, default=0.1)

    v = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    v.add_argument("suite")

    g = sub.add_parser("gauss-energy", parents=[common], help="energy of a Gaussian state by Pfaffians")
    g.add_argument("covariance")
    g.add_argument("hamiltonian")
    g.add_argument("--check", action="store_true", help="compare with the dense statevector")
    return p


COMMANDS = {
    "build": cmd_build,
    "prep": cmd_prep,
    "decide": cmd_decide,
    "verify": cmd_verify,
    "gauss-energy": cmd_gauss_energy,
}


def main(argv=None) -> int:
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        body, code = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"glhbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedError as exc:
        print(f"glhbench: unsupported: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GLHError, ValueError, OSError) as exc:
        print(f"glhbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "command": args.command,
        "config": {k: v for k, v in sorted(vars(args).items()) if k != "command"},
        "cap_qubits": cfg.qubit_cap,
        "seed": args.seed,
        "result": body,
        "exit_code": code,
        "timing": {"elapsed_s": time.perf_counter() - t0},
    }
    text = dumps(report)
    if args.out and args.command != "build":
        Path(args.out).write_text(text + "\n")
    print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
