"""
Manifest Service
Plain-text manifest parser for user-defined charts
"""

import re
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from models.records import Manifest, ManifestInterval, SamplingSpec
from services.catalog_service import catalog
from services.clifford_service import Signature
from services.expression_service import constant_value, parse_expression
from services.frame_service import Chart
from utils.errors import (BranegeoError, DimensionMismatch, ManifestError, ManifestSyntaxError,
                          UnknownKey)
from utils.sampling import parse_grid

SECTIONS = ('ambient', 'chart', 'embedding', 'killing', 'sampling')
_SECTION = re.compile(r'^\[([A-Za-z_]+)\]$')
_EMBEDDING_KEY = re.compile(r'^x(\d+)$')


def _strip_value(raw: str) -> str:
    value = raw.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in '"\'':
        value = value[1:-1]
    return value.strip()


def _tokens(text: str) -> List[Tuple[int, str, str, str]]:
    """(line, section, key, value) entries; section headers validated on the way"""
    entries = []
    section: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        header = _SECTION.match(line)
        if header:
            section = header.group(1).lower()
            if section not in SECTIONS:
                raise UnknownKey(f"Unknown section [{section}]", number)
            continue
        if '=' not in line:
            raise ManifestSyntaxError(f"Expected 'key = value', got '{line}'", number)
        if section is None:
            raise ManifestSyntaxError("Entry outside of any section", number)
        key, value = line.split('=', 1)
        key = key.strip()
        if not key:
            raise ManifestSyntaxError("Missing key before '='", number)
        entries.append((number, section, key, _strip_value(value)))
    return entries


def _interval(name: str, text: str, line: int) -> ManifestInterval:
    if '..' not in text:
        raise ManifestSyntaxError(f"Interval for '{name}' must look like 'low..high'", line)
    low, high = text.split('..', 1)
    try:
        return ManifestInterval(name=name, low=constant_value(low), high=constant_value(high))
    except BranegeoError as e:
        raise ManifestSyntaxError(f"Bad interval bound for '{name}': {e}", line)
    except ValidationError as e:
        raise ManifestError(e.errors()[0]['msg'], line)


def _check_expression(text: str, params: List[str], line: int, key: str):
    try:
        parse_expression(text, params)
    except BranegeoError as e:
        raise ManifestSyntaxError(f"{key}: {e}", line)


def parse_manifest(text: str, name: str = 'manifest') -> Manifest:
    """
    Parse and validate a manifest.

    Args:
        text: manifest contents
        name: target name used in reports

    Returns:
        Manifest

    Raises:
        ManifestSyntaxError, DimensionMismatch, UnknownKey or ManifestError,
        each carrying the 1-based line of the first problem
    """
    entries = _tokens(text)
    signature: Optional[str] = None
    signature_line = 0
    params: List[str] = []
    params_line = 0
    bounds: Dict[str, Tuple[str, int]] = {}
    embedding: Dict[int, Tuple[str, int]] = {}
    killing_raw: List[Tuple[str, str, str, int]] = []
    sampling: Dict[str, Tuple[str, int]] = {}

    for line, section, key, value in entries:
        if section == 'ambient':
            if key != 'signature':
                raise UnknownKey(f"Unknown key '{key}' in [ambient]", line)
            signature, signature_line = value, line
        elif section == 'chart':
            if key == 'params':
                params = [p.strip() for p in value.split(',') if p.strip()]
                params_line = line
                seen = set()
                for p in params:
                    if p in seen:
                        raise ManifestError(f"Duplicate parameter '{p}'", line)
                    seen.add(p)
            else:
                bounds[key] = (value, line)
        elif section == 'embedding':
            match = _EMBEDDING_KEY.match(key)
            if not match:
                raise UnknownKey(f"Embedding keys must be x1, x2, ...; got '{key}'", line)
            embedding[int(match.group(1))] = (value, line)
        elif section == 'killing':
            field_name, _, component = key.rpartition('.')
            if not component.startswith('X_'):
                raise UnknownKey(f"Killing keys must be X_<param> or <field>.X_<param>; got '{key}'", line)
            killing_raw.append((field_name or 'X', component[2:], value, line))
        elif section == 'sampling':
            if key not in ('mode', 'count', 'grid', 'seed'):
                raise UnknownKey(f"Unknown key '{key}' in [sampling]", line)
            sampling[key] = (value, line)

    if signature is None:
        raise ManifestError("Missing [ambient] signature")
    try:
        sig = Signature.parse(signature)
    except (BranegeoError, ValueError) as e:
        raise ManifestSyntaxError(f"Bad signature '{signature}': {e}", signature_line)
    if not params:
        raise ManifestError("Missing [chart] params")

    for key, (_, line) in bounds.items():
        if key not in params:
            raise UnknownKey(f"Interval for unknown parameter '{key}'", line)
    intervals = []
    for p in params:
        if p not in bounds:
            raise ManifestError(f"Missing interval for parameter '{p}'", params_line)
        intervals.append(_interval(p, *bounds[p]))

    expected = list(range(1, sig.n + 1))
    if sorted(embedding) != expected:
        line = max((ln for _, ln in embedding.values()), default=signature_line)
        raise DimensionMismatch(
            f"Signature '{signature}' needs embedding components x1..x{sig.n}, got {len(embedding)}", line
        )
    if len(params) >= sig.n:
        raise DimensionMismatch(f"Chart dimension {len(params)} must be below ambient dimension {sig.n}",
                                params_line)
    formulas = []
    for index in expected:
        value, line = embedding[index]
        _check_expression(value, params, line, f"x{index}")
        formulas.append(value)

    killing: Dict[str, Dict[str, str]] = {}
    for field_name, param, value, line in killing_raw:
        if param not in params:
            raise UnknownKey(f"Killing component for unknown parameter '{param}'", line)
        _check_expression(value, params, line, f"{field_name}.X_{param}")
        killing.setdefault(field_name, {})[param] = value
    killing_fields = {k: [comps.get(p, '0') for p in params] for k, comps in killing.items()}

    spec = None
    if sampling:
        try:
            mode = sampling.get('mode', ('random', 0))[0]
            if mode not in ('random', 'grid'):
                raise ManifestSyntaxError(f"Sampling mode must be random or grid, got '{mode}'",
                                          sampling['mode'][1])
            grid = None
            if 'grid' in sampling:
                grid = list(parse_grid(sampling['grid'][0], len(params)))
            spec = SamplingSpec(
                mode=mode,
                count=int(sampling['count'][0]) if 'count' in sampling else 64,
                grid=grid,
                seed=int(sampling['seed'][0]) if 'seed' in sampling else None,
            )
        except ValueError as e:
            if isinstance(e, ManifestError):
                raise
            line = min(ln for _, ln in sampling.values())
            raise ManifestSyntaxError(f"Bad sampling entry: {e}", line)

    return Manifest(
        name=name,
        signature=signature,
        params=params,
        intervals=intervals,
        embedding=formulas,
        killing=killing_fields,
        sampling=spec,
    )


def chart_from_manifest(manifest: Manifest) -> Chart:
    params = manifest.params
    return Chart(
        name=manifest.name,
        params=list(params),
        signature=Signature.parse(manifest.signature),
        embedding=[parse_expression(e, params) for e in manifest.embedding],
        domain=[(iv.low, iv.high) for iv in manifest.intervals],
        killing={k: [parse_expression(e, params) for e in exprs] for k, exprs in manifest.killing.items()},
        expressions={'embedding': list(manifest.embedding)},
    )


def load_manifest(path: str) -> Manifest:
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    stem = re.sub(r'\.[^.]*$', '', path.replace('\\', '/').rsplit('/', 1)[-1])
    return parse_manifest(text, name=stem or 'manifest')


def resolve_target(manifold: Optional[str] = None, manifest_path: Optional[str] = None,
                   manifest_text: Optional[str] = None,
                   constants: Optional[Dict[str, float]] = None) -> Tuple[Chart, Optional[SamplingSpec]]:
    """
    Chart for a builtin name or a manifest, plus the manifest's sampling spec if any.

    Raises:
        ManifestError for bad manifests, KeyError/ValueError for bad builtin requests
    """
    given = [x is not None for x in (manifold, manifest_path, manifest_text)]
    if sum(given) != 1:
        raise ValueError("Exactly one of manifold, manifest path or manifest text is required")
    if manifold is not None:
        return catalog.build(manifold, **(constants or {})), None
    manifest = load_manifest(manifest_path) if manifest_path else parse_manifest(manifest_text)
    return chart_from_manifest(manifest), manifest.sampling
