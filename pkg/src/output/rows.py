"""
Conversion of experiment results into output rows with theory columns.
"""

from ..oracle.quantum import (
    expectations,
    filtering_directions,
    heisenberg_product_theory,
    ozawa_lhs_theory,
    prob_detuned,
    prob_triple,
    theory_epsilon_eta,
    triple_expectations,
)
from ..schemas.models import (
    AXIS_X,
    AXIS_Y,
    FilteringTripleRow,
    OracleTableRow,
    RobertsonSweepRow,
    RunManifest,
    TripleCountTable,
    UncertaintySweepRow,
)
from ..stats.estimators import (
    frequencies,
    moment_stderrs,
    moments_of,
    robertson_check,
    sign_mean_stderr,
    triple_moments,
    uncertainty_record,
)


def _run_columns(manifest: RunManifest) -> dict:
    return {
        "seed": manifest.seed,
        "n_events": manifest.n_events,
        "model": manifest.model.value,
        "gamma": manifest.gamma,
    }


def uncertainty_rows(manifest: RunManifest, points) -> list[UncertaintySweepRow]:
    """One row per detuning angle; expectation columns come from the configured moment."""
    a = manifest.moment_vector
    rows = []
    for point in points:
        phi = point.phi
        measured = moments_of(frequencies(point.table_a))
        stderr = moment_stderrs(point.table_a)
        record = uncertainty_record(phi, point.table_x, point.table_y)
        theory = expectations(a, phi)
        rows.append(UncertaintySweepRow(
            phi=phi,
            s1=measured.s1,
            s2=measured.s2,
            s1s2=measured.s1s2,
            epsilon=record.epsilon,
            eta=record.eta,
            ozawa_lhs=record.ozawa_lhs,
            heisenberg_product=record.heisenberg_product,
            theory_s1=theory.s1,
            theory_s2=theory.s2,
            theory_s1s2=theory.s1s2,
            theory_epsilon=theory_epsilon_eta(phi).epsilon,
            theory_eta=theory_epsilon_eta(phi).eta,
            theory_ozawa_lhs=ozawa_lhs_theory(phi),
            theory_product=heisenberg_product_theory(phi),
            bound=record.bound,
            stderr_s1=stderr.s1,
            stderr_s2=stderr.s2,
            stderr_s1s2=stderr.s1s2,
            stderr_epsilon=record.stderr_epsilon,
            stderr_eta=record.stderr_eta,
            stderr_ozawa_lhs=record.stderr_ozawa_lhs,
            stderr_product=record.stderr_product,
            detected=point.table_a.total_detected,
            **_run_columns(manifest),
        ))
    return rows


def filtering_rows(
    manifest: RunManifest, results: list[tuple[float, TripleCountTable]]
) -> list[FilteringTripleRow]:
    """Triple correlators next to both two-analyzer predictions they must reproduce."""
    a = manifest.moment_vector
    rows = []
    for phi, table in results:
        measured = triple_moments(table)
        theory = triple_expectations(prob_triple(a, *filtering_directions(phi)))
        pair_x = expectations(AXIS_X, phi)
        pair_y = expectations(AXIS_Y, phi)
        rows.append(FilteringTripleRow(
            phi=phi,
            **measured._asdict(),
            **{f"theory_{k}": v for k, v in theory._asdict().items()},
            **{f"pair_x_{k}": v for k, v in pair_x._asdict().items()},
            **{f"pair_y_{k}": v for k, v in pair_y._asdict().items()},
            stderr_pair=max(sign_mean_stderr(v, table.emitted) for v in measured),
            **_run_columns(manifest),
        ))
    return rows


def robertson_rows(manifest: RunManifest, points) -> list[RobertsonSweepRow]:
    rows = []
    for point in points:
        ax, ay, az = point.moment
        record = robertson_check(point.sigma_x, point.sigma_y, point.sigma_z, manifest.n_events, az=point.az)
        rows.append(RobertsonSweepRow(
            az=point.az,
            ax=ax,
            ay=ay,
            sigma_x=point.sigma_x,
            sigma_y=point.sigma_y,
            sigma_z=point.sigma_z,
            lhs=record.lhs,
            rhs=record.rhs,
            theory_lhs=(1.0 - ax * ax) * (1.0 - ay * ay),
            theory_rhs=az * az,
            stderr_lhs=record.stderr_lhs,
            stderr_rhs=record.stderr_rhs,
            **_run_columns(manifest),
        ))
    return rows


def oracle_rows(manifest: RunManifest, phis) -> list[OracleTableRow]:
    """Theory-only table; nothing is sampled."""
    a = manifest.moment_vector
    rows = []
    for phi in phis:
        p = prob_detuned(a, phi).p
        theory = expectations(a, phi)
        t = theory_epsilon_eta(phi)
        rows.append(OracleTableRow(
            phi=phi,
            p_pp=p[(1, 1)],
            p_pm=p[(1, -1)],
            p_mp=p[(-1, 1)],
            p_mm=p[(-1, -1)],
            theory_s1=theory.s1,
            theory_s2=theory.s2,
            theory_s1s2=theory.s1s2,
            theory_epsilon=t.epsilon,
            theory_eta=t.eta,
            theory_ozawa_lhs=ozawa_lhs_theory(phi),
            theory_product=heisenberg_product_theory(phi),
            bound=1.0,
            **_run_columns(manifest),
        ))
    return rows
