import itertools
import json

import numpy as np
import pytest

from unsharp_bell.bell import coplanar_configuration, singlet_state
from unsharp_bell.fine import (
    PAIR_KEYS,
    SINGLE_KEYS,
    Jpd4,
    ProbabilityTable,
    TableError,
    chsh_check,
    feasibility_oracle,
    find_witness,
    marginals,
    reconstruct_jpd,
    table_from_quantum,
)
from unsharp_bell.sampling import random_density

ROOT2 = np.sqrt(2.0)


def uniform_table():
    return ProbabilityTable(
        singles={k: 0.5 for k in SINGLE_KEYS},
        pairs={k: 0.25 for k in PAIR_KEYS},
    )


def random_jpd_table(rng):
    weights = rng.random(16)
    weights /= weights.sum()
    jpd = Jpd4(weights.reshape(2, 2, 2, 2))
    return marginals(jpd), jpd


def table_deviation(a, b):
    ds = max(abs(a.single(k) - b.single(k)) for k in SINGLE_KEYS)
    dp = max(abs(a.pair(i, j) - b.pair(i, j)) for i, j in PAIR_KEYS)
    return max(ds, dp)


def test_marginals_brute_force(rng):
    # against a direct loop over the sixteen outcome tuples
    weights = rng.random(16)
    weights /= weights.sum()
    jpd = Jpd4(weights.reshape(2, 2, 2, 2))
    table = marginals(jpd)
    signs = (1, -1)
    for k in (1, 2, 3, 4):
        want = sum(
            jpd.entry(o)
            for o in itertools.product(signs, repeat=4)
            if o[k - 1] == 1
        )
        np.testing.assert_allclose(table.single(k), want, atol=1e-14)
    for i, j in PAIR_KEYS:
        slot_i, sign_i = abs(i) - 1, 1 if i > 0 else -1
        slot_j, sign_j = abs(j) - 1, 1 if j > 0 else -1
        want = sum(
            jpd.entry(o)
            for o in itertools.product(signs, repeat=4)
            if o[slot_i] == sign_i and o[slot_j] == sign_j
        )
        np.testing.assert_allclose(table.pair(i, j), want, atol=1e-14)


def test_jpd_round_trip(rng):
    table, jpd = random_jpd_table(rng)
    back = Jpd4.from_json_dict(jpd.to_json_dict())
    for o in itertools.product((1, -1), repeat=4):
        np.testing.assert_allclose(back.entry(o), jpd.entry(o), atol=0)


def test_table_json_round_trip(rng):
    table, _ = random_jpd_table(rng)
    back = ProbabilityTable.from_json_dict(json.loads(json.dumps(table.to_json_dict())))
    assert table_deviation(table, back) == 0.0


def test_table_csv_round_trip(rng):
    table, _ = random_jpd_table(rng)
    back = ProbabilityTable.from_csv_text(table.to_csv_text())
    assert table_deviation(table, back) == 0.0


def test_table_validation_errors():
    table = uniform_table()
    broken = ProbabilityTable(
        singles={**table.singles, 1: 0.7},
        pairs=dict(table.pairs),
    )
    with pytest.raises(TableError):
        broken.validate()
    missing = dict(table.pairs)
    missing.pop((1, 3))
    with pytest.raises(TableError, match="missing"):
        ProbabilityTable(singles=dict(table.singles), pairs=missing).validate()


def test_uniform_table_feasible():
    result = reconstruct_jpd(uniform_table())
    assert result.feasible
    assert result.witness is None
    assert table_deviation(marginals(result.jpd), uniform_table()) <= 1e-12


def test_jpd_marginals_always_feasible(rng):
    for _ in range(50):
        table, _ = random_jpd_table(rng)
        result = reconstruct_jpd(table)
        assert result.feasible
        assert table_deviation(marginals(result.jpd), table) <= 1e-8
        oracle = feasibility_oracle(table)
        assert oracle.feasible


def test_quantum_above_threshold_infeasible():
    table = table_from_quantum(singlet_state(), coplanar_configuration(1.0, np.pi / 4))
    check = chsh_check(table)
    assert not check.all_hold
    result = reconstruct_jpd(table)
    assert not result.feasible
    assert result.witness is not None
    oracle = feasibility_oracle(table)
    assert not oracle.feasible


def test_quantum_below_threshold_feasible():
    table = table_from_quantum(singlet_state(), coplanar_configuration(0.8, np.pi / 4))
    assert chsh_check(table).all_hold
    result = reconstruct_jpd(table)
    assert result.feasible
    assert table_deviation(marginals(result.jpd), table) <= 1e-8
    assert feasibility_oracle(table).feasible


def test_threshold_witness_value():
    # at full sharpness the optimal configuration pushes one CHSH form
    # up to (1 + sqrt 2)/2
    table = table_from_quantum(singlet_state(), coplanar_configuration(1.0, np.pi / 4))
    witness = find_witness(table)
    assert witness.side == "upper"
    np.testing.assert_allclose(witness.value, (1 + ROOT2) / 2, atol=1e-12)
    np.testing.assert_allclose(witness.slack, (ROOT2 - 1) / 2, atol=1e-12)


def test_chsh_check_forms_agree(rng):
    for _ in range(50):
        table, _ = random_jpd_table(rng)
        check = chsh_check(table)
        np.testing.assert_allclose(check.pair_form, check.single_form, atol=1e-9)


def test_chsh_equivalence_on_random_states(rng):
    # feasibility, the inequalities and the exact oracle agree everywhere
    for trial in range(60):
        if trial % 2 == 0:
            table, _ = random_jpd_table(rng)
        else:
            config = coplanar_configuration(rng.uniform(0.6, 1.0), rng.uniform(0, np.pi / 2))
            state = singlet_state() if trial % 4 == 1 else random_density(rng, 4)
            table = table_from_quantum(state, config)
        check = chsh_check(table)
        result = reconstruct_jpd(table)
        oracle = feasibility_oracle(table)
        assert check.all_hold == result.feasible == oracle.feasible


def test_linprog_cross_check(rng):
    # independent LP feasibility on the full sixteen-entry polytope
    from scipy.optimize import linprog

    def lp_feasible(table):
        outcomes = list(itertools.product((1, -1), repeat=4))
        index = {o: n for n, o in enumerate(outcomes)}
        rows, rhs = [], []
        for k, key in enumerate((1, 2, 3, 4)):
            row = np.zeros(16)
            for o in outcomes:
                if o[k] == 1:
                    row[index[o]] = 1.0
            rows.append(row)
            rhs.append(table.single(key))
        for i, j in PAIR_KEYS:
            slot_i, sign_i = abs(i) - 1, 1 if i > 0 else -1
            slot_j, sign_j = abs(j) - 1, 1 if j > 0 else -1
            row = np.zeros(16)
            for o in outcomes:
                if o[slot_i] == sign_i and o[slot_j] == sign_j:
                    row[index[o]] = 1.0
            rows.append(row)
            rhs.append(table.pair(i, j))
        rows.append(np.ones(16))
        rhs.append(1.0)
        res = linprog(
            np.zeros(16),
            A_eq=np.array(rows),
            b_eq=np.array(rhs),
            bounds=[(0, None)] * 16,
            method="highs",
        )
        return res.status == 0

    for trial in range(40):
        if trial % 2 == 0:
            table, _ = random_jpd_table(rng)
        else:
            config = coplanar_configuration(rng.uniform(0.7, 1.0), rng.uniform(0, np.pi / 2))
            table = table_from_quantum(singlet_state(), config)
        assert reconstruct_jpd(table).feasible == lp_feasible(table)


def test_coexistent_quadruple_solves_its_own_table(rng):
    # below the universal limit, the Born probabilities of the quadruple
    # joint observable form a valid jpd reproducing the quantum table
    from unsharp_bell.operators import expectation
    from unsharp_bell.sampling import random_unit_vector
    from unsharp_bell.spin_povm import PAIR_SHARPNESS_LIMIT, quadruple_joint

    for _ in range(10):
        s = rng.uniform(0.0, PAIR_SHARPNESS_LIMIT)
        axes = tuple(random_unit_vector(rng) for _ in range(4))
        from unsharp_bell.bell import BellConfiguration

        config = BellConfiguration(s, *axes)
        state = singlet_state() if rng.random() < 0.5 else random_density(rng, 4)
        joint = quadruple_joint(s, *axes)
        entries = np.empty((2, 2, 2, 2))
        index = {1: 0, -1: 1}
        for key, effect in joint.effects.items():
            entries[tuple(index[o] for o in key)] = expectation(state, effect)
        jpd = Jpd4(entries)
        table = table_from_quantum(state, config)
        assert table_deviation(marginals(jpd), table) <= 1e-12
        assert chsh_check(table).all_hold


def test_witness_soundness(rng):
    # every infeasibility witness evaluates outside [0, 1] on the table
    found = 0
    for _ in range(40):
        config = coplanar_configuration(rng.uniform(0.85, 1.0), np.pi / 4)
        table = table_from_quantum(singlet_state(), config)
        result = reconstruct_jpd(table)
        if result.feasible:
            continue
        found += 1
        value = result.witness.value
        assert value < -1e-9 or value > 1.0 + 1e-9
        assert result.witness.slack > 0
    assert found > 0


def test_infeasible_perturbation_detected():
    # push one pair probability past its CHSH budget
    table = table_from_quantum(singlet_state(), coplanar_configuration(0.84, np.pi / 4))
    assert reconstruct_jpd(table).feasible
    bumped_pairs = dict(table.pairs)
    bumped_pairs[(1, -3)] = min(1.0, bumped_pairs[(1, -3)] + 0.08)
    bumped_pairs[(1, 3)] = max(0.0, table.single(1) - bumped_pairs[(1, -3)])
    bumped_pairs[(-1, -3)] = table.single(-3) - bumped_pairs[(1, -3)]
    bumped_pairs[(-1, 3)] = table.single(3) - bumped_pairs[(1, 3)]
    bumped = ProbabilityTable(singles=dict(table.singles), pairs=bumped_pairs)
    result = reconstruct_jpd(bumped)
    assert not result.feasible
    assert result.witness is not None and result.witness.slack > 0


def test_inconsistent_table_rejected():
    table = uniform_table()
    pairs = dict(table.pairs)
    pairs[(1, 3)] = 0.4  # breaks the marginal identity by 0.15
    with pytest.raises(TableError, match="consistency|marginal"):
        chsh_check(ProbabilityTable(singles=dict(table.singles), pairs=pairs))


def test_quantum_table_matches_born_rule(rng):
    from unsharp_bell.operators import expectation
    from unsharp_bell.spin_povm import unsharp_effect

    config = coplanar_configuration(0.9, 0.6)
    state = random_density(rng, 4)
    table = table_from_quantum(state, config)
    effect_1 = unsharp_effect(config.axes[0], 0.9)
    effect_3 = unsharp_effect(config.axes[2], 0.9)
    want = expectation(state, np.kron(effect_1, effect_3))
    np.testing.assert_allclose(table.pair(1, 3), want, atol=1e-12)
