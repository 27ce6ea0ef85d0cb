"""Registered example instances used by the verification suite and the CLI."""

from __future__ import annotations

from .geometry import MetricInstance, load_instance

REGISTERED: dict[str, dict] = {
    # curved metric (space form) with a closed conformal one-form, profile 1
    "riemannian-conformal": {
        "dim": 3,
        "alpha": {"family": "spherical", "params": {"kappa": 1.0}},
        "beta": {"family": "concircular", "params": {"kappa": 1.0, "scale": 0.1}},
        "phi": {"family": "riemannian", "params": {}},
        "name": "riemannian-conformal",
    },
    # flat metric, radial one-form (closed conformal, constant factor)
    "randers-radial": {
        "dim": 3,
        "alpha": {"family": "euclidean", "params": {}},
        "beta": {"family": "radial", "params": {"c": 0.1}},
        "phi": {"family": "randers", "params": {}},
        "name": "randers-radial",
    },
    # flat metric, rotational one-form (not conformal: pure antisymmetric part)
    "randers-rotational": {
        "dim": 3,
        "alpha": {"family": "euclidean", "params": {}},
        "beta": {"family": "rotational", "params": {"c": 0.1}},
        "phi": {"family": "randers", "params": {}},
        "name": "randers-rotational",
    },
    # Randers metric written through its navigation data
    "randers-navigation": {
        "dim": 3,
        "alpha": {"family": "euclidean", "params": {}},
        "beta": {"family": "radial", "params": {"c": 0.1}},
        "phi": {"family": "navigation-randers", "params": {}},
        "name": "randers-navigation",
    },
    # the classical constant-S-curvature Randers example: closed but not
    # conformal one-form, so only the general spray path applies
    "brs": {
        "dim": 3,
        "alpha": {"family": "brs", "params": {"eps": 0.2}},
        "beta": {"family": "brs", "params": {"eps": 0.2}},
        "phi": {"family": "randers", "params": {}},
        "name": "brs",
    },
    # two-dimensional closed conformal cases with varying factor c(x)
    "randers-radial-2d": {
        "dim": 2,
        "alpha": {"family": "euclidean", "params": {}},
        "beta": {"family": "radial", "params": {"c": 0.1}},
        "phi": {"family": "randers", "params": {}},
        "name": "randers-radial-2d",
    },
    "concircular-2d": {
        "dim": 2,
        "alpha": {"family": "spherical", "params": {"kappa": 1.0}},
        "beta": {"family": "concircular", "params": {"kappa": 1.0, "scale": 0.1}},
        "phi": {"family": "randers", "params": {}},
        "name": "concircular-2d",
    },
}

# instances whose one-form is closed conformal at every point of the box
CONFORMAL_CLOSED = (
    "riemannian-conformal",
    "randers-radial",
    "randers-navigation",
    "randers-radial-2d",
    "concircular-2d",
)

# the spray-equivalence suite
SPRAY_SUITE = (
    "riemannian-conformal",
    "randers-radial",
    "randers-rotational",
    "randers-navigation",
    "brs",
)


def registered_instance(name: str) -> MetricInstance:
    return load_instance(dict(REGISTERED[name]))


def theorem_family_instance(phi_doc: dict, dim: int = 3, c: float = 0.1) -> dict:
    """Instance document pairing a profile with a radial conformal one-form.

    Singular profiles get a domain box away from the origin so b^2 stays in
    a moderate range where their quadratures are well conditioned.
    """
    doc = {
        "dim": dim,
        "alpha": {"family": "euclidean", "params": {}},
        "beta": {"family": "radial", "params": {"c": c}},
        "phi": dict(phi_doc),
        "name": f"{phi_doc.get('family', 'custom')}-radial",
    }
    from .geometry import make_phi

    phi = make_phi(phi_doc["family"], phi_doc.get("params", {}))
    if phi.singular:
        doc["domain"] = {"low": [3.0] * dim, "high": [4.5] * dim}
    return doc
