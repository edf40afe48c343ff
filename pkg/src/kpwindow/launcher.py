import argparse
import configparser
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, TextIO

from kpwindow import __version__, defaults
from kpwindow.coefficients import format_rational, parse_rational
from kpwindow.cohomology import (
    UNBOUNDED,
    complex_cohomology,
    dual_number_splitting,
    format_dimension,
    monomial_count,
    pc_cross_identity,
    picture_cohomology,
    random_unit,
    stability_probe,
    tangent_report,
)
from kpwindow.corpus import (
    first_cohomology_algebra,
    named_subspaces,
    projective_plane,
    random_corpus,
    random_subspace,
    single_generator,
)
from kpwindow.documents import (
    dumps,
    operator_to_dict,
    pair_to_dict,
    read_document,
    series_to_dict,
    subspace_to_dict,
)
from kpwindow.errors import (
    EXIT_OK,
    KpWindowError,
    PropertyCheckError,
    ValidationError,
    exit_code_for,
)
from kpwindow.hierarchy import (
    KDV_PRINTED_COEFFICIENT,
    ParshinRing,
    action_base_cases,
    action_is_multiplicative,
    apply_to_field,
    derive_kdv,
    derive_kp,
    dress,
    flow_well_posed,
    flows_commute,
    kp_flow,
    parshin_flow,
    random_field_term,
    random_lax,
    random_monic,
)
from kpwindow.series import monomial
from kpwindow.subspace import (
    MonomialBox,
    condition_star_star,
    explicit_level_dims,
    fredholm_check,
    in_order_kernel,
    level_dims,
    ord_unit,
    schur_check,
)

COMMANDS = (
    "coh",
    "fredholm",
    "schur",
    "starstar",
    "ord",
    "kp-derive",
    "kdv-derive",
    "flow",
    "dress",
    "apply",
    "selfcheck",
)

# (minimum, maximum) number of --input documents per command; None is unlimited
INPUT_COUNTS = {
    "coh": (1, None),
    "fredholm": (1, None),
    "schur": (2, 2),
    "starstar": (2, 2),
    "ord": (2, 2),
    "kp-derive": (0, 0),
    "kdv-derive": (0, 0),
    "dress": (1, 1),
    "apply": (2, 2),
    "selfcheck": (0, 0),
}

WINDOW_DEFAULTS = {
    "u_cap": defaults.U_CAP,
    "t_lo": defaults.T_LO,
    "t_hi": defaults.T_CAP,
    "floor": defaults.FLOOR,
    "depth_cap": defaults.DEPTH_CAP,
    "margin": defaults.MARGIN,
    "seed": 0,
    "format": "table",
    "log_dir": None,
}

# full-size case counts of the selfcheck sweeps; --samples caps each of them
SELFCHECK_SIZES = {
    "corpus": 30,
    "monomial": 100,
    "levels": 50,
    "units": 100,
    "dual": 50,
    "lax": 50,
    "dressing": 25,
    "action": 25,
}


def get_logger(
    name: str = "kpwindow",
    level: int = logging.INFO,
    log_dir: Optional[str] = None,
) -> logging.Logger:
    logger = logging.getLogger(name)
    if not logger.handlers:
        logger.setLevel(level)
        formatter = logging.Formatter("[%(asctime)s] %(levelname)s: %(message)s")
        ch = logging.StreamHandler()
        ch.setFormatter(formatter)
        logger.addHandler(ch)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
            log_file = os.path.join(log_dir, f"{name}.log")
            fh = logging.FileHandler(log_file)
            fh.setFormatter(formatter)
            logger.addHandler(fh)
    return logger


def get_config_path(cli_path: Optional[str] = None) -> str:
    """Return the path of kpwindow.ini: --config, then KPWINDOW_CONFIG, then <project>/config."""
    if cli_path:
        return cli_path
    env_path = os.environ.get("KPWINDOW_CONFIG")
    if env_path:
        return env_path
    # <project-root>/config/kpwindow.ini, with src/kpwindow/ below the project root
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    return os.path.join(project_root, "config", "kpwindow.ini")


def get_cache_dir() -> str:
    """Platform cache directory, honoring KPWINDOW_CACHE_DIR."""
    env_cache_dir = os.environ.get("KPWINDOW_CACHE_DIR")
    if env_cache_dir:
        return env_cache_dir
    from platformdirs import user_cache_dir

    return user_cache_dir("kpwindow")


def _getint(config: configparser.ConfigParser, section: str, key: str, config_path: str) -> int:
    try:
        return config.getint(section, key, fallback=WINDOW_DEFAULTS[key])
    except ValueError:
        raise ValidationError(f"{key} must be an integer, got {config.get(section, key)!r}", f"{config_path}:[{section}]")


def read_window_config(config_path: str, logger: logging.Logger) -> dict:
    """Read kpwindow.ini; a missing file leaves the built-in defaults in place."""
    logger.debug(f"Attempting to read window config from: {config_path}")
    if not os.path.exists(config_path):
        logger.warning(f"Config file not found: {config_path}, using built-in defaults")
        return dict(WINDOW_DEFAULTS)
    config = configparser.ConfigParser()
    try:
        config.read(config_path, encoding="utf-8")
    except configparser.Error as exc:
        raise ValidationError(f"unreadable config: {exc}", config_path)
    logger.info(f"Successfully read config file: {config_path}")
    config_dict = {
        key: _getint(config, "windows", key, config_path)
        for key in ("u_cap", "t_lo", "t_hi", "floor", "depth_cap", "margin", "seed")
    }
    config_dict["format"] = config.get("output", "format", fallback=WINDOW_DEFAULTS["format"])
    config_dict["log_dir"] = config.get("output", "log_dir", fallback=None) or None
    logger.debug(f"Config values loaded: {config_dict}")
    return config_dict


@dataclass
class JobConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    u_cap: int = defaults.U_CAP
    t_lo: int = defaults.T_LO
    t_hi: int = defaults.T_CAP
    floor: int = defaults.FLOOR
    depth_cap: int = defaults.DEPTH_CAP
    margin: int = defaults.MARGIN
    seed: int = 0
    output_format: str = "table"
    log_level: str = "INFO"
    log_dir: Optional[str] = None
    n: int = 2
    depth: int = 4
    kind: str = "kp"
    i: int = 0
    j: int = 1
    alpha: Optional[Fraction] = None
    samples: Optional[int] = None
    require_algebra: bool = True

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}", "command")
        if not self.t_lo <= -1 < 1 <= self.t_hi:
            raise ValidationError(f"t-range [{self.t_lo}, {self.t_hi}) must contain [-1, 1)", "t_lo")
        if self.floor > -1:
            raise ValidationError(f"operator floor must be <= -1, got {self.floor}", "floor")
        if self.u_cap < 1:
            raise ValidationError(f"u_cap must be >= 1, got {self.u_cap}", "u_cap")
        if not 1 <= self.depth_cap <= 24:
            raise ValidationError(f"depth_cap must lie in [1, 24], got {self.depth_cap}", "depth_cap")
        if self.margin < 0:
            raise ValidationError(f"margin must be >= 0, got {self.margin}", "margin")
        if self.output_format not in ("table", "json"):
            raise ValidationError(f"format must be table or json, got {self.output_format!r}", "format")
        if self.samples is not None and self.samples < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples}", "samples")
        if self.command == "flow":
            expected = (0, 0) if self.kind == "kp" else (1, 1)
        else:
            expected = INPUT_COUNTS[self.command]
        low, high = expected
        count = len(self.inputs)
        if count < low or (high is not None and count > high):
            wanted = str(low) if low == high else f"at least {low}"
            raise ValidationError(f"{self.command} takes {wanted} --input document(s), got {count}", "input")

    @property
    def box(self) -> MonomialBox:
        """Stand-in box for subspace documents without one."""
        return MonomialBox(self.t_lo, self.t_hi, -self.u_cap, self.u_cap)


def print_job_config(config: JobConfig, logger: logging.Logger) -> None:
    msg = (
        "kpwindow job configuration:\n"
        f"  Command: {config.command}\n"
        f"  Inputs: {', '.join(config.inputs) or '-'}\n"
        f"  Window: t in [{config.t_lo}, {config.t_hi}), u_cap {config.u_cap}, floor {config.floor}\n"
        f"  KP depth cap: {config.depth_cap}\n"
        f"  Stability margin: {config.margin}, seed: {config.seed}\n"
        f"  Output format: {config.output_format}"
    )
    logger.info(msg)


def _table_value(value) -> str:
    if value is UNBOUNDED:
        return str(UNBOUNDED)
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return ", ".join(f"{k}={_table_value(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_table_value(v) for v in value) + "]"
    return str(value)


def render_table(title: str, rows: Dict[str, object]) -> str:
    width = max([len(key) for key in rows] + [8]) + 2
    lines = [title, "-" * len(title)]
    lines.extend(f"{key:<{width}}{_table_value(value)}" for key, value in rows.items())
    return "\n".join(lines) + "\n"


def _machine(value):
    if value is UNBOUNDED:
        return format_dimension(value, machine=True)
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {k: _machine(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_machine(v) for v in value]
    return value


class Report:
    """Sections of ``(title, rows)`` rendered as a table or a single json document."""

    def __init__(self, command: str):
        self.command = command
        self.sections: List[tuple] = []

    def add(self, title: str, rows: Dict[str, object]) -> None:
        self.sections.append((title, rows))

    def render(self, output_format: str) -> str:
        if output_format == "json":
            body = {"command": self.command, "results": [
                {"title": title, **_machine(rows)} for title, rows in self.sections
            ]}
            return dumps(body) + "\n"
        return "\n".join(render_table(title, rows) for title, rows in self.sections)


def _load_subspace(config: JobConfig, path: str, logger: logging.Logger):
    w = read_document(path, ("subspace",), default_box=config.box)
    logger.debug(f"{path}: read as {dumps(subspace_to_dict(w))}")
    return w


def _load_series(path: str):
    return read_document(path, ("series",))


def _cohomology_rows(picture, complex_, cross: bool) -> Dict[str, object]:
    return {
        "h0": picture.h0,
        "h1": picture.h1,
        "h2": picture.h2,
        "window": {"h0": picture.window_h0, "h1": picture.window_h1, "h2": picture.window_h2},
        "complex route": {"h0": complex_.h0, "h1": complex_.h1, "h2": complex_.h2},
        "routes agree": picture.dims == complex_.dims,
        "stable": picture.stable and complex_.stable,
        "certified": picture.certified,
        "cross identity": cross,
    }


def run_coh(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    for path in config.inputs:
        w = _load_subspace(config, path, logger)
        picture = picture_cohomology(w, config.margin)
        complex_ = complex_cohomology(w, config.margin)
        if picture.dims != complex_.dims:
            raise PropertyCheckError(f"{path}: picture route {picture.dims} differs from complex route {complex_.dims}")
        cross = pc_cross_identity(w)
        if not cross:
            raise PropertyCheckError(f"{path}: cross identity for h1 fails")
        if not (picture.stable and complex_.stable):
            logger.warning(f"{path}: dimensions change when the box grows by {config.margin}")
        report.add(path, _cohomology_rows(picture, complex_, cross))


def run_fredholm(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    for path in config.inputs:
        result = fredholm_check(_load_subspace(config, path, logger))
        rows: Dict[str, object] = {"fredholm": result.verdict}
        for j, level in enumerate(result.low):
            rows[f"below {level.level + 1} [{j}]"] = {"h0": _finite(level.h0), "h1": _finite(level.h1)}
        for level in result.levels:
            rows[f"level {level.level}"] = {"h0": _finite(level.h0), "h1": _finite(level.h1)}
        for j, level in enumerate(result.high):
            rows[f"from {level.level} [{j}]"] = {"h0": _finite(level.h0), "h1": _finite(level.h1)}
        report.add(path, rows)


def _finite(value):
    return UNBOUNDED if value == float("inf") else value


def run_schur(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    a = _load_subspace(config, config.inputs[0], logger)
    w = _load_subspace(config, config.inputs[1], logger)
    result = schur_check(a, w, config.margin, require_algebra=config.require_algebra)
    rows: Dict[str, object] = {"schur pair": result.ok, "products checked": result.checked}
    if result.witness is not None:
        x, y = result.witness
        rows["witness a"] = [[n, e, j, format_rational(c)] for (n, e, j), c in sorted(x.items())]
        rows["witness w"] = [[n, e, j, format_rational(c)] for (n, e, j), c in sorted(y.items())]
    report.add("schur", rows)


def run_starstar(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    a = _load_subspace(config, config.inputs[0], logger)
    candidate = _load_series(config.inputs[1])
    report.add("condition (**)", {"holds": condition_star_star(a, candidate)})


def run_ord(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    a = _load_series(config.inputs[0])
    b = _load_series(config.inputs[1])
    ord_a, ord_b, ord_ab = ord_unit(a, b)
    report.add(
        "ord",
        {
            "ord a": ord_a,
            "ord b": ord_b,
            "ord ab": ord_ab,
            "additive": ord_ab == ord_a + ord_b,
            "a in kernel": in_order_kernel(a, config.t_hi, config.u_cap),
            "b in kernel": in_order_kernel(b, config.t_hi, config.u_cap),
        },
    )


def run_kp_derive(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    derivation = derive_kp(depth_cap=config.depth_cap)
    if not derivation.vanishes:
        raise PropertyCheckError(f"KP residual is nonzero at depth {derivation.depth}")
    report.add(
        "(4u_t - u''' - 12uu')' - 3u_yy",
        {"residual": "0", "depth": derivation.depth},
    )


def run_kdv_derive(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    result = derive_kdv(depth_cap=config.depth_cap)
    if not result.consistent:
        raise PropertyCheckError(
            f"KdV coefficient {result.coefficient} at depth {result.depth} "
            f"differs from {result.check_coefficient} at depth {result.check_depth}"
        )
    if not result.matches_printed:
        logger.warning(
            f"derived KdV coefficient {format_rational(result.coefficient)} "
            f"differs from the printed {format_rational(KDV_PRINTED_COEFFICIENT)}"
        )
    report.add(
        "4u_t - c u''' - 12uu' = 0",
        {
            "c": result.coefficient,
            "printed c": result.printed_coefficient,
            "matches printed": result.matches_printed,
            "depth": result.depth,
            "check depth": result.check_depth,
            "consistent": result.consistent,
            "t_2 flow vanishes": result.even_flow_vanishes,
        },
    )


def run_flow(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    if config.kind == "kp":
        derivation = kp_flow(config.n, config.depth)
        ring = derivation.ring
        report.add(
            f"t_{config.n} flow at depth {config.depth}",
            {f"da_{i}": ring.to_descriptor(image) for i, image in sorted(derivation.images.items())},
        )
        return
    if config.kind != "parshin":
        raise ValidationError(f"flow kind must be kp or parshin, got {config.kind!r}", "kind")
    path = config.inputs[0]
    ring, pair = read_document(path, ("pair",), default_floor=config.floor)
    rhs_l, rhs_m = parshin_flow(ring, pair, config.i, config.j, config.alpha)
    report.add(
        f"V({config.i}, {config.j})",
        {"dL": operator_to_dict(ring, rhs_l), "dM": operator_to_dict(ring, rhs_m)},
    )


def run_dress(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    path = config.inputs[0]
    ring, s = read_document(path, ("operator",), default_floor=config.floor)
    pair = dress(ring, s)
    admissible = pair.admissible(ring)
    if not admissible:
        raise PropertyCheckError(f"{path}: dressed pair does not commute on its window")
    report.add("dressed pair", {"pair": pair_to_dict(ring, pair), "admissible": admissible})


def run_apply(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    ring, a = read_document(config.inputs[0], ("operator",), default_floor=config.floor)
    f = _load_series(config.inputs[1])
    report.add("A . f", {"series": series_to_dict(apply_to_field(ring, a, f, config.t_hi))})


def _check(results: Dict[str, object], name: str, passed: int, total: int) -> None:
    results[name] = f"{passed}/{total}"
    if passed != total:
        raise PropertyCheckError(f"{name}: {total - passed} of {total} cases fail")


def _sample_size(config: JobConfig, sweep: str) -> int:
    size = SELFCHECK_SIZES[sweep]
    return size if config.samples is None else min(size, config.samples)


def run_selfcheck(config: JobConfig, report: Report, logger: logging.Logger) -> None:
    """The property suite: cohomology identities, units, hierarchies, the quotient action."""
    rng = random.Random(config.seed)
    results: Dict[str, object] = {}
    corpus = list(named_subspaces().values()) + random_corpus(config.seed, _sample_size(config, "corpus"))
    agree = sum(picture_cohomology(w).dims == complex_cohomology(w).dims for w in corpus)
    _check(results, "route equality", agree, len(corpus))
    certified = [w for w in corpus if picture_cohomology(w).certified]
    _check(results, "cross identity", sum(pc_cross_identity(w) for w in certified), len(certified))
    _check(
        results, "window stability", sum(stability_probe(w, config.margin) for w in certified), len(certified)
    )
    logger.info(f"cohomology identities verified on {len(corpus)} subspaces")

    monomial_cases = _sample_size(config, "monomial")
    counted = 0
    for _ in range(monomial_cases):
        w = random_subspace(rng, rank=rng.choice([1, 2]), monomial_generators=True)
        expected = monomial_count(w)
        counted += picture_cohomology(w).dims == expected == complex_cohomology(w).dims
    _check(results, "monomial oracle", counted, monomial_cases)

    level_cases = _sample_size(config, "levels")
    matched = checked = 0
    while checked < level_cases:
        w = random_subspace(rng, rank=rng.choice([1, 2]))
        for n in w.box.levels():
            expected = explicit_level_dims(w, n)
            if expected is None:
                continue
            found = level_dims(w, n)
            matched += (found.h0, found.h1) == expected
            checked += 1
            if checked == level_cases:
                break
    _check(results, "level oracle", matched, level_cases)

    single = single_generator()
    detected = picture_cohomology(single).h1 == 1 == complex_cohomology(single).h1
    tangent = tangent_report(first_cohomology_algebra())
    detected = detected and tangent.pic_kernel_dim == 1 and not tangent.representable
    _check(results, "h1 detection", int(detected), 1)
    dual_cases = _sample_size(config, "dual")
    split = sum(dual_number_splitting(a, dual_cases, config.seed) for a in (projective_plane(), first_cohomology_algebra()))
    _check(results, "dual-number splitting", split, 2)

    unit_cases = _sample_size(config, "units")
    additive = kernel = 0
    for _ in range(unit_cases):
        a, b = random_unit(rng), random_unit(rng)
        ord_a, ord_b, ord_ab = ord_unit(a, b)
        additive += ord_ab == ord_a + ord_b
        kernel += in_order_kernel(a, config.t_hi, config.u_cap) == (ord_a == 0)
    _check(results, "ord additivity", additive, unit_cases)
    _check(results, "ord kernel", kernel, unit_cases)

    _check(results, "KP identity", int(derive_kp(depth_cap=config.depth_cap).vanishes), 1)
    _check(results, "KdV consistency", int(derive_kdv(depth_cap=config.depth_cap).consistent), 1)
    _check(results, "flow commutativity", int(flows_commute(2, 3, 6)), 1)

    lax_cases = _sample_size(config, "lax")
    well_posed = 0
    for _ in range(lax_cases):
        operators, lax = random_lax(rng, rng.randint(1, 6), config.floor)
        well_posed += all(flow_well_posed(operators, lax, n) for n in range(1, 6))
    _check(results, "flow well-posedness", well_posed, lax_cases)

    ring = ParshinRing(inner_floor=config.floor, outer_floor=config.floor)
    dress_cases = _sample_size(config, "dressing")
    admissible = sum(dress(ring, random_monic(ring, rng)).admissible(ring) for _ in range(dress_cases))
    _check(results, "dressing", admissible, dress_cases)

    action_cases = _sample_size(config, "action")
    multiplicative = 0
    for _ in range(action_cases):
        a, b = random_field_term(ring, rng), random_field_term(ring, rng)
        f = monomial(rng.randint(0, 2), rng.randint(0, 2))
        multiplicative += action_is_multiplicative(ring, a, b, f)
    _check(results, "quotient action", multiplicative, action_cases)
    _check(results, "quotient action base cases", int(action_base_cases(ring)), 1)
    report.add("selfcheck", results)


RUNNERS: Dict[str, Callable[[JobConfig, Report, logging.Logger], None]] = {
    "coh": run_coh,
    "fredholm": run_fredholm,
    "schur": run_schur,
    "starstar": run_starstar,
    "ord": run_ord,
    "kp-derive": run_kp_derive,
    "kdv-derive": run_kdv_derive,
    "flow": run_flow,
    "dress": run_dress,
    "apply": run_apply,
    "selfcheck": run_selfcheck,
}


def run(config: JobConfig, logger: logging.Logger, stream: Optional[TextIO] = None) -> int:
    """Execute one job and write its report; returns the exit code."""
    stream = stream or sys.stdout
    report = Report(config.command)
    try:
        config.validate()
        print_job_config(config, logger=logger)
        RUNNERS[config.command](config, report, logger)
    except KpWindowError as exc:
        code = exit_code_for(exc)
        logger.error(f"{config.command} failed ({type(exc).__name__}): {exc}")
        return code
    stream.write(report.render(config.output_format))
    stream.flush()
    return EXIT_OK


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(prog="kpwindow", description="Exact windowed computations on KP/Parshin data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", action="append", default=[], help="Input document (repeatable)")
    parser.add_argument("--config", help="Path to kpwindow.ini config file")
    parser.add_argument("--format", choices=("table", "json"), help="Report format")
    parser.add_argument("--margin", type=int, help="Box enlargement for the stability check")
    parser.add_argument("--seed", type=int, help="Seed for random property sweeps")
    parser.add_argument("--u-cap", dest="u_cap", type=int, help="Series u-cap")
    parser.add_argument("--t-lo", dest="t_lo", type=int, help="Lowest t-level of the default box")
    parser.add_argument("--t-hi", dest="t_hi", type=int, help="Series t-cap and top of the default box")
    parser.add_argument("--floor", type=int, help="Operator floor")
    parser.add_argument("--depth-cap", dest="depth_cap", type=int, help="Hard cap for KP depth escalation")
    parser.add_argument("--log-level", dest="log_level", default="INFO",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    parser.add_argument("--kind", choices=("kp", "parshin"), default="kp", help="flow: hierarchy")
    parser.add_argument("--n", type=int, default=2, help="flow --kind kp: flow index")
    parser.add_argument("--depth", type=int, default=4, help="flow --kind kp: depth of the generic Lax operator")
    parser.add_argument("--i", type=int, default=0, help="flow --kind parshin: power of L")
    parser.add_argument("--j", type=int, default=1, help="flow --kind parshin: power of M")
    parser.add_argument("--alpha", help="flow --kind parshin: slope bound, i <= alpha*j")
    parser.add_argument("--samples", type=int, help="selfcheck: cap on the random cases per property")
    parser.add_argument("--no-algebra-check", dest="require_algebra", action="store_false",
                        help="schur: skip the check that A is closed under multiplication")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace, logger: logging.Logger) -> JobConfig:
    """Merge ini values with command-line overrides."""
    values = read_window_config(get_config_path(args.config), logger=logger)
    for key in ("u_cap", "t_lo", "t_hi", "floor", "depth_cap", "margin", "seed", "format"):
        override = getattr(args, key)
        if override is not None:
            values[key] = override
    alpha = parse_rational(args.alpha, "alpha") if args.alpha is not None else None
    return JobConfig(
        command=args.command,
        inputs=list(args.input),
        u_cap=values["u_cap"],
        t_lo=values["t_lo"],
        t_hi=values["t_hi"],
        floor=values["floor"],
        depth_cap=values["depth_cap"],
        margin=values["margin"],
        seed=values["seed"],
        output_format=values["format"],
        log_level=args.log_level,
        log_dir=values["log_dir"],
        n=args.n,
        depth=args.depth,
        kind=args.kind,
        i=args.i,
        j=args.j,
        alpha=alpha,
        samples=args.samples,
        require_algebra=args.require_algebra,
    )


def main(argv: Optional[List[str]] = None) -> None:
    args = parse_args(argv)
    logger = get_logger("kpwindow", getattr(logging, args.log_level))
    try:
        config = build_config(args, logger)
    except KpWindowError as exc:
        logger.error(f"invalid configuration: {exc}")
        sys.exit(exit_code_for(exc))
    if config.log_dir:
        log_dir = config.log_dir if os.path.isabs(config.log_dir) else os.path.abspath(config.log_dir)
    else:
        log_dir = get_cache_dir()
    _attach_file_handler(logger, log_dir)
    sys.exit(run(config, logger))


def _attach_file_handler(logger: logging.Logger, log_dir: str) -> None:
    """Add the file handler once the log directory is known."""
    if any(isinstance(h, logging.FileHandler) for h in logger.handlers):
        return
    os.makedirs(log_dir, exist_ok=True)
    fh = logging.FileHandler(os.path.join(log_dir, f"{logger.name}.log"))
    fh.setFormatter(logging.Formatter("[%(asctime)s] %(levelname)s: %(message)s"))
    logger.addHandler(fh)


if __name__ == "__main__":
    main()
