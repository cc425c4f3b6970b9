"""The portalis command line.

Subcommands: load, check, serve, eval, metric, event, render. Exit codes:
0 success, 1 diagnostics (parse/semantic/engine errors), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Optional

from .dsl import (
    load_file,
    parse_bytes,
    parse_chain_text,
    parse_pattern_text,
    parse_predicate_text,
)
from .dsl.printer import print_schema
from .engine import PortalEngine
from .errors import PortalisError
from .events import PolicyMode, UpdatePolicy
from .gateway import PortalGateway
from .httpd import make_server

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_INTERNAL = 2


def default_schema_path() -> Path:
    return Path(resources.files("portalis") / "schemas" / "demo.pds")


def _policy(args) -> UpdatePolicy:
    mode = {"event": PolicyMode.EVENT_DRIVEN,
            "periodic": PolicyMode.PERIODIC,
            "manual": PolicyMode.MANUAL}[args.policy]
    return UpdatePolicy(mode, period=args.period)


def _load_engine(path: Path, policy: UpdatePolicy) -> Optional[PortalEngine]:
    result = load_file(path, policy=policy)
    for diagnostic in result.diagnostics:
        print(diagnostic.format(str(path)), file=sys.stderr)
    return result.engine


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_load(args) -> int:
    engine = _load_engine(Path(args.file), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    _print_json(engine.summary())
    return EXIT_OK


def cmd_check(args) -> int:
    path = Path(args.file) if args.file else default_schema_path()
    data = path.read_bytes()
    parsed = parse_bytes(data)
    if not parsed.ok:
        for diagnostic in parsed.diagnostics:
            print(diagnostic.format(str(path)), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    from .dsl import load as load_ast
    result = load_ast(parsed.ast)
    for diagnostic in result.diagnostics:
        print(diagnostic.format(str(path)), file=sys.stderr)
    if not result.ok:
        return EXIT_DIAGNOSTICS
    print(f"{path}: ok")
    if args.print_canonical:
        sys.stdout.write(print_schema(parsed.ast))
    return EXIT_OK


def cmd_serve(args) -> int:
    engine = _load_engine(Path(args.schema), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    static_dir = Path(args.static) if args.static else None
    server = make_server(PortalGateway(engine), host=args.host,
                         port=args.port, static_dir=static_dir)
    host, port = server.server_address[:2]
    print(f"portalis serving on http://{host}:{port} "
          f"(policy={args.policy}, schema={args.schema})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_eval(args) -> int:
    engine = _load_engine(Path(args.schema), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    if args.frame:
        pattern, diagnostics = parse_pattern_text(args.frame)
        if pattern is None:
            for diagnostic in diagnostics:
                print(diagnostic.format("<frame>"), file=sys.stderr)
            return EXIT_DIAGNOSTICS
        bindings = engine.frames.query_frames(pattern)
        payload = {"frame": args.frame,
                   "bindings": [dict(sorted(b.items())) for b in bindings]}
        if "?" not in args.frame:  # all-constant pattern: a truth query
            payload["holds"] = bindings == [{}]
        _print_json(payload)
        return EXIT_OK
    if not args.predicate:
        print("eval needs --predicate or --frame", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    expr, diagnostics = parse_predicate_text(args.predicate)
    if expr is None:
        for diagnostic in diagnostics:
            print(diagnostic.format("<predicate>"), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    matched = engine.tower.comprehend_at_level(args.level, expr)
    _print_json({"level": args.level, "matched": sorted(matched)})
    return EXIT_OK


def cmd_metric(args) -> int:
    engine = _load_engine(Path(args.schema), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    metric = engine.metrics.get(args.name)
    if metric is None:
        print(f"no metric {args.name!r} in the schema", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    chain, diagnostics = parse_chain_text(args.chain or "")
    if chain is None:
        for diagnostic in diagnostics:
            print(diagnostic.format("<chain>"), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    values = metric.apply_assignment(chain)
    _print_json({
        "metric": args.name,
        "chain": [f"{dim}={value}" for dim, value in chain],
        "values": sorted(values),
        "saturation": metric.saturation_level(),
    })
    return EXIT_OK


def _parse_arg_literal(text: str):
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            continue
    if text in ("true", "false"):
        return text == "true"
    return text


def cmd_event(args) -> int:
    engine = _load_engine(Path(args.schema), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    event_args = {}
    for pair in args.arg or []:
        key, sep, raw = pair.partition("=")
        if not sep:
            print(f"--arg wants key=value, got {pair!r}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        event_args[key] = _parse_arg_literal(raw)
    session = engine.open_session(args.profile)
    try:
        summary = engine.dispatch_client(session.token, args.name, event_args)
    finally:
        engine.close_session(session.token)
    _print_json(summary)
    return EXIT_OK


def cmd_update(args) -> int:
    engine = _load_engine(Path(args.schema), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    values = {}
    for pair in args.set or []:
        key, sep, raw = pair.partition("=")
        if not sep:
            print(f"--set wants field=value, got {pair!r}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        values[key] = _parse_arg_literal(raw)
    change = {"op": args.op, "id": args.id, "values": values}
    ack = engine.warehouse.mutate(args.repo, change,
                                  content_critical=args.critical)
    _print_json(ack)
    return EXIT_OK


def cmd_agent(args) -> int:
    engine = _load_engine(Path(args.schema), _policy_from_mode(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    updates: dict[int, list[dict]] = {}
    for spec in args.update or []:
        tick_text, sep, body = spec.partition(":")
        if not sep or not tick_text.isdigit():
            print(f"--update wants TICK:JSON, got {spec!r}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        try:
            descriptor = json.loads(body)
        except json.JSONDecodeError as exc:
            print(f"--update JSON invalid: {exc}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        updates.setdefault(int(tick_text), []).append(descriptor)
    trace = []
    for tick in range(1, args.ticks + 1):
        for descriptor in updates.get(tick, []):
            engine.warehouse.mutate(
                descriptor["repo"], descriptor["change"],
                content_critical=descriptor.get("contentCritical", True))
        refreshed = engine.run_agent(tick)
        trace.append({"tick": tick, "refreshed": refreshed,
                      "pending": sorted(engine.agent.pending)})
    _print_json({"mode": args.mode, "period": args.period, "trace": trace})
    return EXIT_OK


def _policy_from_mode(args) -> UpdatePolicy:
    mode = {"event": PolicyMode.EVENT_DRIVEN,
            "periodic": PolicyMode.PERIODIC,
            "manual": PolicyMode.MANUAL}[args.mode]
    return UpdatePolicy(mode, period=args.period)


def cmd_render(args) -> int:
    engine = _load_engine(Path(args.schema), _policy(args))
    if engine is None:
        return EXIT_DIAGNOSTICS
    session = engine.open_session(args.profile)
    try:
        rendered = engine.render(args.page, session.token,
                                 enforce_profile=session.profile)
        _print_json(rendered.to_json())
    finally:
        engine.close_session(session.token)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_policy_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--policy", choices=("event", "periodic", "manual"),
                        default="event", help="content refresh policy")
    parser.add_argument("--period", type=int, default=1,
                        help="refresh period in ticks (periodic policy)")


def _add_schema_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--schema", default=str(default_schema_path()),
                        help="schema file (defaults to the packaged demo)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portalis",
        description="profile-personalized, event-driven portal middleware")
    commands = parser.add_subparsers(dest="command", required=True)

    p_load = commands.add_parser("load", help="load a schema, print a summary")
    p_load.add_argument("file")
    _add_policy_options(p_load)
    p_load.set_defaults(fn=cmd_load)

    p_check = commands.add_parser(
        "check", help="parse + semantic-check a schema")
    p_check.add_argument("file", nargs="?", default=None)
    p_check.add_argument("--print-canonical", action="store_true",
                         help="also print the canonical formatting")
    p_check.set_defaults(fn=cmd_check)

    p_serve = commands.add_parser("serve", help="run the HTTP gateway")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--static", default=None,
                         help="directory with the browser frontend")
    _add_schema_option(p_serve)
    _add_policy_options(p_serve)
    p_serve.set_defaults(fn=cmd_serve)

    p_eval = commands.add_parser(
        "eval", help="comprehend a predicate at a tower level, or query "
                     "the frame network")
    p_eval.add_argument("--level", type=int, default=0)
    p_eval.add_argument("--predicate", default=None)
    p_eval.add_argument("--frame", default=None,
                        help='frame pattern, e.g. "follows(?who, vAnn)"')
    _add_schema_option(p_eval)
    _add_policy_options(p_eval)
    p_eval.set_defaults(fn=cmd_eval)

    p_metric = commands.add_parser(
        "metric", help="apply an assignment chain to a metric")
    p_metric.add_argument("name")
    p_metric.add_argument("--chain", default="",
                          help='e.g. "s=higraph,p=registered"')
    _add_schema_option(p_metric)
    _add_policy_options(p_metric)
    p_metric.set_defaults(fn=cmd_metric)

    p_event = commands.add_parser(
        "event", help="submit a client event under a persona")
    p_event.add_argument("name")
    p_event.add_argument("--profile", required=True)
    p_event.add_argument("--arg", action="append",
                         help="event argument key=value (repeatable)")
    _add_schema_option(p_event)
    _add_policy_options(p_event)
    p_event.set_defaults(fn=cmd_event)

    p_render = commands.add_parser(
        "render", help="render a page under a persona")
    p_render.add_argument("page")
    p_render.add_argument("--profile", required=True)
    _add_schema_option(p_render)
    _add_policy_options(p_render)
    p_render.set_defaults(fn=cmd_render)

    p_update = commands.add_parser(
        "update", help="apply one warehouse change descriptor")
    p_update.add_argument("repo")
    p_update.add_argument("--op", choices=("add", "update"), required=True)
    p_update.add_argument("--id", required=True)
    p_update.add_argument("--set", action="append",
                          help="field=value (repeatable)")
    p_update.add_argument("--critical", action="store_true",
                          help="mark the change content-critical")
    _add_schema_option(p_update)
    _add_policy_options(p_update)
    p_update.set_defaults(fn=cmd_update)

    p_agent = commands.add_parser(
        "agent", help="drive the update agent over logical ticks")
    p_agent.add_argument("--mode", choices=("event", "periodic", "manual"),
                         default="event")
    p_agent.add_argument("--period", type=int, default=1)
    p_agent.add_argument("--ticks", type=int, default=5)
    p_agent.add_argument("--update", action="append",
                         help='TICK:{"repo":...,"change":{...},'
                              '"contentCritical":true} (repeatable)')
    _add_schema_option(p_agent)
    p_agent.set_defaults(fn=cmd_agent)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PortalisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except Exception as exc:  # anything else is an internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
