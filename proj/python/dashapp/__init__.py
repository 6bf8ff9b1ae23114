"""Python front end for the distributed-optimization simulator.

Thin wrappers over the compiled module: structured values cross the boundary
as JSON strings and are decoded here.
"""

import json as _json

try:
    from dashapp import _dashapp as _core
except ImportError:  # in-tree build: extension sits on PYTHONPATH directly
    import _dashapp as _core

__version__ = _core.__version__

canonicalize_libsvm = _core.canonicalize_libsvm
synthetic_libsvm = _core.synthetic_libsvm
rand_k_compress = _core.rand_k_compress
rand_k_omega = _core.rand_k_omega


def theory_params(variant, **inputs):
    """Prescribed (a, b, gamma_max, ...) for a variant's convergence analysis.

    Keyword arguments mirror the calculator inputs: omega, n, p_a, p_aa, L,
    L_hat, L_max, L_sigma, sigma_sq, m, B, epsilon, d, zeta_C, delta0.
    """
    return _json.loads(_core.theory_params_json(variant, _json.dumps(inputs)))


def pl_params(variant, **inputs):
    """Linear-rate parameters under gradient dominance (requires mu)."""
    return _json.loads(_core.pl_params_json(variant, _json.dumps(inputs)))


def complexity(variant, **inputs):
    """Leading communication/oracle complexity terms for RandK runs."""
    return _json.loads(_core.complexity_json(variant, _json.dumps(inputs)))


def run_config(config_text, output_dir="."):
    """Run an experiment from config text; returns the decoded summary."""
    return _json.loads(_core.run_config_json(config_text, output_dir))


def verify(seed=1):
    """Exact-enumeration verification battery; list of result dicts."""
    return _json.loads(_core.verify_json(seed))
