"""One check class per subcommand."""

from typing import Any, Dict, List

import numpy as np
import structlog

from core.config import get_settings
from core.exceptions import ConfigError, VerificationError
from formal.algebra import GaussianRing, MatrixRing, confluence_check
from formal.coefficients import (
    CoeffTable,
    closed_form_table,
    phi_apply,
    random_diagonal,
    rescale_table,
    solve_table,
    violated_equations,
)
from formal.forms import run_identity_trials
from formal.genus1 import (
    delta_power_commutator,
    formal_flatness_check,
    formal_parallel_check,
    genus1_algebra,
    summarize_residual,
    trivialisation_series_check,
    two_direction_algebra,
    verify_adiff,
    verify_recursion,
)
from formal.scalars import ONE, ZERO, gaussian, random_gaussian
from formal.series import (
    FormalSeries,
    inv_t_series,
    phi_taylor,
    r_series,
    rho_series,
    scalar_series,
    series_rows,
)
from landau import experiments
from landau.functions import curve_function
from landau.operators import LandauModel
from schemas.reports import CheckResult
from schemas.run_config import RunConfig

from .base_check import BaseCheck, CheckOutcome

logger = structlog.get_logger(__name__)
settings = get_settings()


def _exact(name: str, residual_text: str, passed: bool, **details: Any) -> CheckResult:
    return CheckResult(name=name, passed=passed, residual=residual_text, details=details)


def _series_residual(name: str, residual: FormalSeries, **details: Any) -> CheckResult:
    bad = residual.nonzero_degrees()
    return _exact(name, "0" if not bad else f"nonzero at degrees {bad}", not bad, **details)


def _from_outcome(outcome: experiments.ExperimentOutcome, **extra: Any) -> CheckOutcome:
    results = [
        CheckResult(
            name=m.name,
            passed=m.passed,
            residual=m.value,
            threshold=m.threshold,
            details=dict(m.details),
        )
        for m in outcome.measurements
    ]
    rows = [{**extra, **row} for row in outcome.rows]
    return CheckOutcome(results, rows)


def _require_order(config: RunConfig, minimum: int = 1) -> int:
    if config.max_order < minimum:
        raise ConfigError(f"{config.subcommand} needs max_order >= {minimum}, got {config.max_order}")
    return config.max_order


class CoeffsCheck(BaseCheck):
    """Coefficient table from the recursion, with its oracle checks."""

    name = "coeffs"

    def _diagonal(self, config: RunConfig, rng: np.random.Generator, order: int):
        explicit = config.explicit_diagonal()
        if explicit is not None:
            return explicit
        if config.diagonal == "random":
            return random_diagonal(rng, order)
        return None

    def execute(self, config: RunConfig) -> CheckOutcome:
        k, order = config.k, _require_order(config)
        rng = np.random.default_rng(config.seed)
        diagonal = self._diagonal(config, rng, order)
        table = solve_table(k, order, diagonal)
        closed = closed_form_table(k, order)

        results = []
        for sign in (1, -1):
            violated = violated_equations(table, sign)
            results.append(_exact(f"coefficient_equations_{'plus' if sign > 0 else 'minus'}",
                                  "0" if not violated else str(violated), not violated))

        phi_mismatch = [l for l in range(1, order + 1) if phi_apply(table.rows[l - 1], k) != table.rows[l][:l]]
        results.append(_exact("phi_apply_agreement", "0" if not phi_mismatch else f"rows {phi_mismatch}", not phi_mismatch))

        if diagonal is None:
            results.append(_exact("closed_form_agreement", "0" if table == closed else "tables differ", table == closed))
        else:
            rescaled = rescale_table(closed, [ONE] + list(diagonal[:order]))
            results.append(_exact("rescale_agreement", "0" if rescaled == table else "tables differ", rescaled == table))

        series = []
        for name, value in (
            ("rho", rho_series(k, order)),
            ("r", r_series(k, order)),
            ("inv_t", inv_t_series(k, order)),
            ("inv_tbar", inv_t_series(k, order, conjugate=True)),
            ("phi", phi_taylor(k, order)),
        ):
            series.extend(series_rows(name, value))

        return CheckOutcome(results, table.to_frame().to_dict("records"), series)


class AlgebraCheck(BaseCheck):
    """Genus-one commutation relations, the adiff identity and rewriting confluence."""

    name = "verify-algebra"

    def execute(self, config: RunConfig) -> CheckOutcome:
        k, order = config.k, _require_order(config)
        alg = genus1_algebra(k)
        rng = np.random.default_rng(config.seed)

        failures: List[str] = []
        for sign in (1, -1):
            for n in range(1, order + 1):
                try:
                    delta_power_commutator(alg, sign, n)
                except VerificationError as e:
                    failures.append(f"sign={sign}, n={n}: {e.residual}")
        results = [_exact("delta_power_commutator", "0" if not failures else "; ".join(failures), not failures, max_n=order)]

        adiff_order = config.adiff_order or order
        adiff_failures = []
        for l in range(1, adiff_order + 1):
            passed, text = summarize_residual(verify_adiff(alg, l))
            if not passed:
                adiff_failures.append(f"l={l}: {text}")
        results.append(_exact("adiff", "0" if not adiff_failures else "; ".join(adiff_failures), not adiff_failures,
                              max_l=adiff_order))

        for algebra in (alg.algebra, two_direction_algebra(k)):
            mismatches = confluence_check(algebra, rng, samples=config.samples)
            results.append(_exact(
                f"confluence_{algebra.name}",
                "0" if not mismatches else f"{len(mismatches)} words",
                not mismatches,
                samples=config.samples,
            ))
        return CheckOutcome(results)


class RecursionCheck(BaseCheck):
    """Symbolic recursion for zero and random diagonals, uniqueness and the BCH solution."""

    name = "verify-recursion"

    def _tables(self, config: RunConfig, rng: np.random.Generator, order: int) -> Dict[str, CoeffTable]:
        tables = {"zero": solve_table(config.k, order)}
        for index in range(config.random_tables):
            tables[f"random_{index}"] = solve_table(config.k, order, random_diagonal(rng, order))
        explicit = config.explicit_diagonal()
        if explicit is not None:
            tables["explicit"] = solve_table(config.k, order, explicit)
        return tables

    def _perturbations(self, table: CoeffTable, rng: np.random.Generator, samples: int) -> int:
        """Number of single off-diagonal perturbations that no E-equation detects."""
        undetected = 0
        for _ in range(samples):
            l = int(rng.integers(1, table.max_order + 1))
            r = int(rng.integers(0, l))
            shift = ZERO
            while not shift:
                shift = random_gaussian(rng)
            perturbed = table.with_entry(l, r, table.entry(l, r) + shift)
            if not violated_equations(perturbed):
                undetected += 1
        return undetected

    def execute(self, config: RunConfig) -> CheckOutcome:
        k, order = config.k, _require_order(config)
        alg = genus1_algebra(k)
        rng = np.random.default_rng(config.seed)

        results = []
        for label, table in self._tables(config, rng, order).items():
            bad = []
            for l in range(1, order + 1):
                passed, text = summarize_residual(verify_recursion(alg, l, table))
                if not passed:
                    bad.append(f"l={l}: {text}")
            results.append(_exact(f"recursion_{label}", "0" if not bad else "; ".join(bad), not bad, max_l=order))

        undetected = self._perturbations(solve_table(k, order), rng, config.samples)
        results.append(_exact("uniqueness_perturbations", str(undetected), undetected == 0, samples=config.samples))
        results.append(_series_residual("formal_parallel", formal_parallel_check(alg, order), order=order))
        return CheckOutcome(results)


class TrivialisationCheck(BaseCheck):
    """exp(r Delta) trivialises the formal connection; optionally the numeric transport."""

    name = "verify-trivialisation"

    @staticmethod
    def _scalar_identity(k: int, order: int) -> FormalSeries:
        """e^{4kr}(1 - ik/s) - (1 + ik/s)."""
        exponential = r_series(k, order).scale(gaussian(4 * k)).exp()
        tail = [ZERO] * (order - 1)
        minus = scalar_series([ONE, gaussian(0, -k)] + tail)
        plus = scalar_series([ONE, gaussian(0, k)] + tail)
        return exponential * minus - plus

    def execute(self, config: RunConfig) -> CheckOutcome:
        k, order = config.k, _require_order(config)
        alg = genus1_algebra(k)
        scalar = self._scalar_identity(k, order)
        results = [
            _series_residual("trivialisation_series", trivialisation_series_check(alg, order), order=order),
            _series_residual("exp_4kr_identity", scalar, order=order),
        ]
        outcome = CheckOutcome(results, series_rows=series_rows("exp_4kr_identity", scalar)
                               + series_rows("exp_4kr", r_series(k, order).scale(gaussian(4 * k)).exp()))

        if config.numeric:
            model = LandauModel(k, config.N)
            numeric = experiments.trivialisation_check(
                model, config.sigma_point, config.sigma_end_point, config.s, step=config.step)
            outcome.extend(_from_outcome(numeric, N=config.N))
        return outcome


class FormsCheck(BaseCheck):
    """Graded-bracket identities on random forms and the formal curvature."""

    name = "verify-forms"

    def execute(self, config: RunConfig) -> CheckOutcome:
        rng = np.random.default_rng(config.seed)
        results = []
        matrices = MatrixRing(2)
        for label, ring, sample in (
            ("scalar", GaussianRing(), random_gaussian),
            ("matrix", matrices, matrices.random),
        ):
            failures = run_identity_trials(rng, ring, 3, sample, config.samples)
            for identity, count in failures.items():
                results.append(_exact(f"{identity}_{label}", str(count), count == 0, trials=config.samples))

        order = _require_order(config)
        bad, control_missed = [], []
        for l in range(1, order + 1):
            passed, text = summarize_residual(formal_flatness_check(l, config.k))
            if not passed:
                bad.append(f"l={l}: {text}")
            if l % 2 == 0 and formal_flatness_check(l, config.k, exact_relation=False).is_zero():
                control_missed.append(l)
        results.append(_exact("formal_flatness", "0" if not bad else "; ".join(bad), not bad, max_l=order))
        if order >= 2:
            results.append(_exact("formal_flatness_control", str(control_missed), not control_missed))
        return CheckOutcome(results)


class LandauCheck(BaseCheck):
    """Numerical experiments in the truncated Landau model."""

    name = "landau"

    def execute(self, config: RunConfig) -> CheckOutcome:
        model = LandauModel(config.k, config.N)
        f = curve_function(config.f)
        sigma, V, W = config.sigma_point, config.V, config.W
        experiment = config.experiment
        logger.info("Landau experiment", experiment=experiment, model=repr(model))

        if experiment == "commutation":
            outcome = _from_outcome(experiments.geometry_check(sigma, V))
            outcome.extend(_from_outcome(experiments.commutation_check(model, sigma, V, f)))
        elif experiment == "dtdelta":
            outcome = _from_outcome(experiments.dT_delta_check(model, sigma, V, config.h))
        elif experiment == "first-step":
            outcome = _from_outcome(experiments.first_step_check(model, sigma, V, f, config.h))
            outcome.extend(_from_outcome(experiments.hwc_laplacian_check(model, sigma, V, config.h)))
        elif experiment == "decay":
            outcome = _from_outcome(experiments.decay_experiment(
                model, f, config.max_order, config.s_grid, sigma, V, floor=settings.residual_floor))
        elif experiment == "flatness":
            outcome = _from_outcome(experiments.flatness_check(model, sigma, V, W, config.s, f, config.h_mixed))
            outcome.extend(_from_outcome(experiments.curvature_relation_check(model, sigma, V, W, config.h)))
            outcome.extend(_from_outcome(experiments.bbbar_bracket(model, sigma, V)))
        elif experiment == "trivialisation":
            outcome = _from_outcome(experiments.trivialisation_check(
                model, sigma, config.sigma_end_point, config.s, step=config.step))
        elif experiment == "obstruction":
            outcome = _from_outcome(experiments.t_obstruction_check(model, sigma, V, W, config.s, f, config.h_mixed))
        elif experiment == "symbols":
            rng = np.random.default_rng(config.seed)
            outcome = _from_outcome(experiments.symbols_check(config.k, sigma, V, rng, config.samples))
        else:
            outcome = _from_outcome(experiments.spectrum_check(model))
        return outcome


CHECKS: Dict[str, type] = {
    "coeffs": CoeffsCheck,
    "verify-algebra": AlgebraCheck,
    "verify-recursion": RecursionCheck,
    "verify-trivialisation": TrivialisationCheck,
    "verify-forms": FormsCheck,
    "landau": LandauCheck,
}
