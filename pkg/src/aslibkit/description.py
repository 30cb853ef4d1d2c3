"""Reader/writer for ``description.txt``.

The grammar is a flat YAML subset: ``key: value`` pairs, inline lists
``[a, b]``, block lists (``- item``), and indentation-nested mappings such as
``feature_steps`` (step name -> requires/provides). Anchors, multi-line
scalars and the like are not supported.
"""

from __future__ import annotations

import math

from .arff import format_number
from .errors import FormatError
from .scenario import FeatureStep, MetaInfo, PerformanceMeasure

_MISSING = object()


# --------------------------------------------------------------------------- generic subset parser


def _unquote(s: str) -> str:
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        body = s[1:-1]
        if s[0] == "'":
            return body.replace("''", "'")
        return body.replace('\\"', '"').replace("\\\\", "\\")
    return s


def _split_inline(body: str, lineno: int) -> list[str]:
    items, buf, quote = [], [], None
    for ch in body:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            items.append("".join(buf))
            buf = []
        elif ch in "[]{}":
            raise FormatError("SYNTAX", "nested flow collections are not supported", line=lineno)
        else:
            buf.append(ch)
    if quote:
        raise FormatError("SYNTAX", "unterminated quote in inline list", line=lineno)
    items.append("".join(buf))
    items = [_unquote(i) for i in items]
    if items == [""]:
        return []
    if any(i == "" for i in items):
        raise FormatError("SYNTAX", "empty item in inline list", line=lineno)
    return items


def _strip_comment(text: str) -> str:
    quote = None
    for i, ch in enumerate(text):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#" and (i == 0 or text[i - 1] in " \t"):
            return text[:i].rstrip()
    return text.rstrip()


def _scalar(text: str, lineno: int):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise FormatError("SYNTAX", f"unterminated inline list {text!r}", line=lineno)
        return _split_inline(text[1:-1], lineno)
    if text.startswith("{"):
        raise FormatError("SYNTAX", "flow mappings are not supported", line=lineno)
    return _unquote(text)


def _split_key(content: str, lineno: int) -> tuple[str, str]:
    quote = None
    for i, ch in enumerate(content):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == ":" and (i + 1 == len(content) or content[i + 1] in " \t"):
            key = _unquote(content[:i])
            if not key:
                raise FormatError("SYNTAX", "empty key", line=lineno)
            return key, content[i + 1:].strip()
    raise FormatError("SYNTAX", f"expected 'key: value', got {content[:40]!r}", line=lineno)


def parse_yaml_subset(text: str) -> dict:
    """Parse the restricted grammar into nested dicts/lists/strings.

    Returns a dict mapping each top-level key to ``(value, line)``.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if "\t" in raw[: len(raw) - len(raw.lstrip())]:
            raise FormatError("SYNTAX", "tab indentation is not allowed", line=lineno)
        content = _strip_comment(raw)
        if not content.strip() or content.strip() == "---":
            continue
        indent = len(content) - len(content.lstrip(" "))
        lines.append((indent, content.strip(), lineno))

    pos = 0

    def block(indent: int):
        nonlocal pos
        if pos >= len(lines):
            return None
        if lines[pos][1].startswith("- ") or lines[pos][1] == "-":
            items = []
            while pos < len(lines) and lines[pos][0] == indent and (lines[pos][1].startswith("- ") or lines[pos][1] == "-"):
                _, content, ln = lines[pos]
                item = content[1:].strip()
                if not item:
                    raise FormatError("SYNTAX", "empty list item", line=ln)
                items.append(_scalar(item, ln))
                pos += 1
            return items
        mapping: dict = {}
        while pos < len(lines) and lines[pos][0] == indent:
            _, content, ln = lines[pos]
            if content.startswith("-"):
                raise FormatError("SYNTAX", "list item where a key was expected", line=ln)
            key, rest = _split_key(content, ln)
            if key in mapping:
                raise FormatError("SYNTAX", f"duplicate key {key!r}", line=ln)
            pos += 1
            if rest:
                value = _scalar(rest, ln)
            elif pos < len(lines) and (
                lines[pos][0] > indent or (lines[pos][0] == indent and lines[pos][1].startswith("-"))
            ):
                value = block(lines[pos][0])
            else:
                value = None
            mapping[key] = (value, ln)
        if pos < len(lines) and lines[pos][0] > indent:
            raise FormatError("SYNTAX", "unexpected indentation", line=lines[pos][2])
        return mapping

    if not lines:
        return {}
    if lines[0][0] != 0:
        raise FormatError("SYNTAX", "top-level keys must not be indented", line=lines[0][2])
    result = block(0)
    if not isinstance(result, dict):
        raise FormatError("SYNTAX", "top level must be a mapping", line=lines[0][2])
    if pos < len(lines):
        raise FormatError("SYNTAX", "unexpected content", line=lines[pos][2])
    return result


# --------------------------------------------------------------------------- MetaInfo


def _plain(value):
    """Strip the (value, line) wrappers of nested mappings."""
    if isinstance(value, dict):
        return {k: _plain(v[0]) for k, v in value.items()}
    return value


def _as_list(value, key, ln) -> list[str]:
    if value is None:
        return []
    if isinstance(value, list):
        return [str(v) for v in value]
    if isinstance(value, dict):
        raise FormatError("SYNTAX", f"{key} must be a list", line=ln)
    return [str(value)]


def _as_number(value, key, ln, optional=True) -> float | None:
    if value is None or value == "?" or value == "":
        if optional:
            return None
        raise FormatError("MISSING_KEY", f"{key} has no value", line=ln)
    if isinstance(value, (list, dict)):
        raise FormatError("SYNTAX", f"{key} must be a number", line=ln)
    try:
        return float(value)
    except ValueError:
        raise FormatError("SYNTAX", f"{key} must be a number, got {value!r}", line=ln) from None


def _as_bool(value, key, ln) -> bool:
    s = str(value).strip().lower()
    if s in ("true", "yes", "1"):
        return True
    if s in ("false", "no", "0"):
        return False
    raise FormatError("SYNTAX", f"{key} expects booleans, got {value!r}", line=ln)


def parse_description(text: str | bytes) -> MetaInfo:
    """Parse ``description.txt`` into :class:`MetaInfo` (declaration order kept)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    doc = parse_yaml_subset(text)

    def get(key, default=_MISSING):
        if key in doc:
            return doc[key]
        if default is _MISSING:
            raise FormatError("MISSING_KEY", f"mandatory key {key!r} is absent")
        return (default, None)

    scenario_id, ln = get("scenario_id")
    if scenario_id is None or isinstance(scenario_id, (list, dict)):
        raise FormatError("SYNTAX", "scenario_id must be a scalar", line=ln)

    names_v, ln = get("performance_measures")
    names = _as_list(names_v, "performance_measures", ln)
    if not names:
        raise FormatError("MISSING_KEY", "performance_measures is empty", line=ln)
    max_v, ln_max = get("maximize", None)
    maximize = [_as_bool(v, "maximize", ln_max) for v in _as_list(max_v, "maximize", ln_max)]
    type_v, ln_type = get("performance_type", None)
    kinds = _as_list(type_v, "performance_type", ln_type)
    if maximize and len(maximize) not in (1, len(names)):
        raise FormatError("SYNTAX", "maximize must have one entry per measure", line=ln_max)
    if kinds and len(kinds) not in (1, len(names)):
        raise FormatError("SYNTAX", "performance_type must have one entry per measure", line=ln_type)
    measures = []
    for n, name in enumerate(names):
        mx = maximize[n if len(maximize) > 1 else 0] if maximize else False
        kind = kinds[n if len(kinds) > 1 else 0] if kinds else "runtime"
        measures.append(PerformanceMeasure(name, kind, mx))

    cutoff_v, ln = get("algorithm_cutoff_time")
    cutoff = _as_number(cutoff_v, "algorithm_cutoff_time", ln, optional=False)
    mem_v, ln_m = get("algorithm_cutoff_memory", None)
    ftime_v, ln_ft = get("features_cutoff_time", None)
    fmem_v, ln_fm = get("features_cutoff_memory", None)

    # algorithms: 2.x metainfo mapping or 1.x deterministic/stochastic lists
    algorithms: list[str] = []
    alg_det: list[bool] = []
    if "metainfo_algorithms" in doc:
        mv, ln = doc["metainfo_algorithms"]
        if not isinstance(mv, dict):
            raise FormatError("SYNTAX", "metainfo_algorithms must be a mapping", line=ln)
        for name, (info, aln) in mv.items():
            info = _plain(info) if isinstance(info, dict) else {}
            det = info.get("deterministic", "true")
            algorithms.append(name)
            alg_det.append(_as_bool(det if det is not None else "true", "deterministic", aln))
    elif "algorithms_deterministic" in doc or "algorithms_stochastic" in doc:
        dv, ln_d = get("algorithms_deterministic", None)
        sv, ln_s = get("algorithms_stochastic", None)
        for a in _as_list(dv, "algorithms_deterministic", ln_d):
            algorithms.append(a)
            alg_det.append(True)
        for a in _as_list(sv, "algorithms_stochastic", ln_s):
            algorithms.append(a)
            alg_det.append(False)
    else:
        raise FormatError("MISSING_KEY", "no algorithms declared (metainfo_algorithms or algorithms_deterministic)")

    # feature steps
    steps: list[FeatureStep] = []
    if "feature_steps" in doc:
        sv, ln = doc["feature_steps"]
        if not isinstance(sv, dict):
            raise FormatError("SYNTAX", "feature_steps must be a mapping", line=ln)
        for name, (info, sln) in sv.items():
            if info is None:
                info = {}
            if not isinstance(info, dict):
                raise FormatError("SYNTAX", f"feature step {name!r} must map to requires/provides", line=sln)
            unknown = set(info) - {"requires", "provides"}
            if unknown:
                raise FormatError("SYNTAX", f"feature step {name!r} has unknown keys {sorted(unknown)}", line=sln)
            req_v, rln = info.get("requires", (None, sln))
            prov_v, pln = info.get("provides", (None, sln))
            steps.append(
                FeatureStep(name, tuple(_as_list(req_v, "requires", rln)), tuple(_as_list(prov_v, "provides", pln)))
            )
    else:
        for key, (v, ln) in doc.items():
            if key.startswith("feature_step "):
                steps.append(FeatureStep(key[len("feature_step "):].strip(), (), tuple(_as_list(v, key, ln))))
        if not steps:
            raise FormatError("MISSING_KEY", "mandatory key 'feature_steps' is absent")
    declared = {s.name for s in steps}
    for s in steps:
        for r in s.requires:
            if r not in declared:
                raise FormatError("UNKNOWN_STEP", f"feature step {s.name!r} requires undeclared step {r!r}")

    if "default_steps" in doc:
        dv, ln = doc["default_steps"]
        default_steps = _as_list(dv, "default_steps", ln)
        for d in default_steps:
            if d not in declared:
                raise FormatError("UNKNOWN_STEP", f"default step {d!r} is not declared", line=ln)
    else:
        default_steps = [s.name for s in steps]

    # features
    feature_names: list[str] = []
    feat_det: list[bool] = []
    if "features_deterministic" in doc or "features_stochastic" in doc:
        dv, ln_d = get("features_deterministic", None)
        sv, ln_s = get("features_stochastic", None)
        for f in _as_list(dv, "features_deterministic", ln_d):
            feature_names.append(f)
            feat_det.append(True)
        for f in _as_list(sv, "features_stochastic", ln_s):
            feature_names.append(f)
            feat_det.append(False)
    else:
        for s in steps:
            for f in s.provides:
                if f not in feature_names:
                    feature_names.append(f)
                    feat_det.append(True)

    version_v, _ = get("format_version", None)

    return MetaInfo(
        scenario_id=str(scenario_id),
        measures=tuple(measures),
        algorithm_cutoff_time=cutoff,
        algorithms=tuple(algorithms),
        feature_names=tuple(feature_names),
        feature_steps=tuple(steps),
        default_steps=tuple(default_steps),
        algorithm_deterministic=tuple(alg_det),
        feature_deterministic=tuple(feat_det),
        algorithm_cutoff_memory=_as_number(mem_v, "algorithm_cutoff_memory", ln_m),
        features_cutoff_time=_as_number(ftime_v, "features_cutoff_time", ln_ft),
        features_cutoff_memory=_as_number(fmem_v, "features_cutoff_memory", ln_fm),
        format_version=None if version_v is None else str(version_v),
    )


# --------------------------------------------------------------------------- writing


def _q(s: str) -> str:
    if s and all(ch.isalnum() or ch in "_-.+/@" for ch in s) and s.lower() not in ("true", "false", "?"):
        return s
    return "'" + s.replace("'", "''") + "'"


def _inline(items) -> str:
    return "[" + ", ".join(_q(str(i)) for i in items) + "]"


def _num(x: float | None) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "?"
    return format_number(x)


def serialize_description(meta: MetaInfo) -> str:
    lines = [f"scenario_id: {_q(meta.scenario_id)}"]
    if meta.format_version is not None:
        lines.append(f"format_version: {_q(meta.format_version)}")
    lines.append(f"performance_measures: {_inline(m.name for m in meta.measures)}")
    lines.append("maximize: " + _inline("true" if m.maximize else "false" for m in meta.measures).replace("'", ""))
    lines.append(f"performance_type: {_inline(m.kind for m in meta.measures)}")
    lines.append(f"algorithm_cutoff_time: {_num(meta.algorithm_cutoff_time)}")
    lines.append(f"algorithm_cutoff_memory: {_num(meta.algorithm_cutoff_memory)}")
    lines.append(f"features_cutoff_time: {_num(meta.features_cutoff_time)}")
    lines.append(f"features_cutoff_memory: {_num(meta.features_cutoff_memory)}")
    det = [f for f, d in zip(meta.feature_names, meta.feature_deterministic) if d]
    sto = [f for f, d in zip(meta.feature_names, meta.feature_deterministic) if not d]
    lines.append(f"features_deterministic: {_inline(det)}")
    lines.append(f"features_stochastic: {_inline(sto)}")
    lines.append(f"number_of_feature_steps: {len(meta.feature_steps)}")
    lines.append(f"default_steps: {_inline(meta.default_steps)}")
    lines.append("feature_steps:")
    for s in meta.feature_steps:
        lines.append(f"  {_q(s.name)}:")
        if s.requires:
            lines.append(f"    requires: {_inline(s.requires)}")
        lines.append(f"    provides: {_inline(s.provides)}")
    lines.append("metainfo_algorithms:")
    for a, d in zip(meta.algorithms, meta.algorithm_deterministic):
        lines.append(f"  {_q(a)}:")
        lines.append(f"    deterministic: {'true' if d else 'false'}")
    return "\n".join(lines) + "\n"
