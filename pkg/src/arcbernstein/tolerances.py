"""Central tolerance table.

Every numerical gate in the package reads from here so that a test or a
CLI run can tighten the whole pipeline in one place.  Values are a
dictionary rather than loose constants so the CLI can report them in run
manifests and switch profiles.
"""

DEFAULT = {
    # algebraic identities (partial fractions, recombination, residues)
    "algebraic": 1e-10,
    # residues that must vanish exactly (rational antiderivatives)
    "residue": 1e-12,
    # geometric fits and map normalizations
    "geometric": 1e-6,
    # boundary-trace pointwise residual
    "trace": 1e-8,
    # Newton iterations (root polish, inverse conformal maps)
    "newton": 1e-12,
    # conformal boundary fit residual
    "fit": 1e-7,
    # closed-curve seam gap
    "curve_close": 1e-12,
    # ledger row slack, relative to max(1, |rhs|)
    "ledger": 1e-9,
}

STRICT = dict(DEFAULT)
STRICT.update({
    "algebraic": 1e-11,
    "geometric": 1e-8,
    "trace": 1e-9,
    "fit": 1e-9,
})

PROFILES = {"default": DEFAULT, "strict": STRICT}


def get(name, profile="default"):
    return PROFILES[profile][name]
