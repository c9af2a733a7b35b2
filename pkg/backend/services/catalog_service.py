"""
Manifold Catalog Service
Builtin embedded charts with their Killing fields and negative controls
"""

import math
from typing import Dict, List, Optional

from services.clifford_service import Signature
from services.expression_service import constant_value, parse_expression
from services.frame_service import Chart
from services.killing_service import KillingField

TWO_PI = '2*pi'


class ManifoldCatalog:
    """Builtin charts, parameterized by the shape constants in `defaults`"""

    # Embedding templates use {name} placeholders for the shape constants
    MANIFOLDS = {
        'plane': {
            'description': 'Flat plane z = 0 in R^3',
            'signature': '+,+,+',
            'params': ['u', 'v'],
            'domain': [('-2', '2'), ('-2', '2')],
            'embedding': ['u', 'v', '0'],
            'defaults': {},
            'killing': {'tx': ['1', '0'], 'ty': ['0', '1'], 'rot': ['-v', 'u']},
            'controls': {'shear': ['v', '0']},
        },
        'sphere': {
            'description': 'Round sphere of radius r in R^3',
            'signature': '+,+,+',
            'params': ['phi', 'theta'],
            'domain': [('0', TWO_PI), ('0', 'pi')],
            'embedding': ['{r}*sin(theta)*cos(phi)', '{r}*sin(theta)*sin(phi)', '{r}*cos(theta)'],
            'defaults': {'r': 1.0},
            'killing': {'rot_z': ['1', '0']},
            'controls': {'twist': ['theta', '0']},
        },
        'torus': {
            'description': 'Torus of revolution with radii R (center) and r (tube) in R^3',
            'signature': '+,+,+',
            'params': ['phi', 'theta'],
            'domain': [('0', TWO_PI), ('0', TWO_PI)],
            'embedding': ['({R} + {r}*cos(theta))*cos(phi)', '({R} + {r}*cos(theta))*sin(phi)',
                          '{r}*sin(theta)'],
            'defaults': {'R': 2.0, 'r': 0.5},
            'killing': {'rot_z': ['1', '0']},
            'controls': {},
        },
        'paraboloid': {
            'description': 'Paraboloid of revolution z = u^2 + v^2 in R^3',
            'signature': '+,+,+',
            'params': ['u', 'v'],
            'domain': [('-1', '1'), ('-1', '1')],
            'embedding': ['u', 'v', 'u^2 + v^2'],
            'defaults': {},
            'killing': {'rot': ['-v', 'u']},
            'controls': {},
        },
        'helicoid': {
            'description': 'Helicoid (u cos v, u sin v, v) in R^3',
            'signature': '+,+,+',
            'params': ['u', 'v'],
            'domain': [('-1', '1'), ('0', TWO_PI)],
            'embedding': ['u*cos(v)', 'u*sin(v)', 'v'],
            'defaults': {},
            'killing': {'screw': ['0', '1']},
            'controls': {},
        },
        'clifford-torus': {
            'description': 'Flat Clifford torus (cos u, sin u, cos v, sin v) in R^4',
            'signature': '+,+,+,+',
            'params': ['u', 'v'],
            'domain': [('0', TWO_PI), ('0', TWO_PI)],
            'embedding': ['cos(u)', 'sin(u)', 'cos(v)', 'sin(v)'],
            'defaults': {},
            'killing': {'shift_u': ['1', '0'], 'shift_v': ['0', '1']},
            'controls': {},
        },
        'ds2': {
            'description': 'Two-dimensional de Sitter space as a hyperboloid in R^(1,2)',
            'signature': '+,-,-',
            'params': ['t', 'phi'],
            'domain': [('-1', '1'), ('0', TWO_PI)],
            'embedding': ['sinh(t)', 'cosh(t)*cos(phi)', 'cosh(t)*sin(phi)'],
            'defaults': {},
            'killing': {'rot': ['0', '1'], 'boost': ['cos(phi)', '-tanh(t)*sin(phi)']},
            'controls': {},
        },
        'hyperbolic-h2': {
            'description': 'Hyperbolic plane as the upper sheet of x3^2 - x1^2 - x2^2 = 1',
            'signature': '+,+,-',
            'params': ['rho', 'phi'],
            'domain': [('0.1', '1.5'), ('0', TWO_PI)],
            'embedding': ['sinh(rho)*cos(phi)', 'sinh(rho)*sin(phi)', 'cosh(rho)'],
            'defaults': {},
            'killing': {'rot': ['0', '1']},
            'controls': {},
        },
    }

    def names(self) -> List[str]:
        return list(self.MANIFOLDS)

    def describe(self) -> List[Dict]:
        """Catalog entries as plain dictionaries"""
        entries = []
        for name, spec in self.MANIFOLDS.items():
            entries.append({
                'name': name,
                'description': spec['description'],
                'signature': spec['signature'],
                'params': spec['params'],
                'domain': [list(bounds) for bounds in spec['domain']],
                'embedding': spec['embedding'],
                'defaults': spec['defaults'],
                'killing': list(spec['killing']),
                'controls': list(spec['controls']),
            })
        return entries

    def build(self, name: str, **constants: float) -> Chart:
        """
        Build a builtin chart.

        Args:
            name: catalog name
            constants: overrides of the shape constants (e.g. r=2.0)

        Returns:
            Chart with its Killing fields and controls attached
        """
        if name not in self.MANIFOLDS:
            raise KeyError(f"Unknown manifold '{name}'. Available: {', '.join(self.MANIFOLDS)}")
        spec = self.MANIFOLDS[name]
        values = dict(spec['defaults'])
        for key, value in constants.items():
            if value is None:
                continue
            if key not in values:
                raise KeyError(f"Manifold '{name}' has no constant '{key}'")
            values[key] = float(value)
        for key, value in values.items():
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"Constant '{key}' must be positive, got {value}")

        params = spec['params']
        formulas = [template.format(**{k: repr(v) for k, v in values.items()})
                    for template in spec['embedding']]
        domain = [(constant_value(lo), constant_value(hi)) for lo, hi in spec['domain']]
        return Chart(
            name=name,
            params=list(params),
            signature=Signature.parse(spec['signature']),
            embedding=[parse_expression(f, params) for f in formulas],
            domain=domain,
            killing={k: [parse_expression(e, params) for e in exprs] for k, exprs in spec['killing'].items()},
            controls={k: [parse_expression(e, params) for e in exprs] for k, exprs in spec['controls'].items()},
            expressions={'embedding': formulas},
        )

    def killing_fields(self, chart: Chart, include_controls: bool = True) -> List[KillingField]:
        fields = [KillingField(name, comps) for name, comps in chart.killing.items()]
        if include_controls:
            fields += [KillingField(name, comps, control=True) for name, comps in chart.controls.items()]
        return fields

    def find_field(self, chart: Chart, name: str) -> Optional[KillingField]:
        for field_ in self.killing_fields(chart):
            if field_.name == name:
                return field_
        return None


catalog = ManifoldCatalog()
