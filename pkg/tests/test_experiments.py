import math

import numpy as np
import pytest

from bdpmc import (
    BinaryMarkovChain,
    ExperimentConfig,
    NoiseParams,
    ResultTable,
    calibrate_asymmetric,
    calibrate_symmetric_exact,
    charged_epsilon,
    feasible_region,
    run_dp_insufficiency,
    run_noise_privacy_comparison,
    run_reconstruction_vs_bound,
    sample,
    success_bound_dp,
)
from bdpmc.experiments import (
    CHARGED_COLUMNS,
    NOISE_COMPARISON_COLUMNS,
    RECONSTRUCTION_COLUMNS,
    REGION_COLUMNS,
    SUCCESS_COLUMNS,
)
from bdpmc.privacy import log_lr_bound


class TestResultTable:
    def test_write_read_round_trip(self, tmp_path):
        table = ResultTable(("a", "b"), ((1.0, 0.25), (float("nan"), 2.0 / 3.0)))
        path = tmp_path / "t.csv"
        table.write_csv(path)
        text = path.read_text()
        assert text.splitlines()[0] == "a,b"
        assert text.splitlines()[2].startswith(",")  # NaN cell is empty
        back = ResultTable.read_csv(path)
        assert back.columns == ("a", "b")
        assert back.rows[0] == (1.0, 0.25)
        assert math.isnan(back.rows[1][0])
        assert back.rows[1][1] == 2.0 / 3.0  # full printed precision

    def test_rectangularity_enforced(self):
        with pytest.raises(ValueError):
            ResultTable(("a", "b"), ((1.0,),))

    def test_byte_stable(self, tmp_path):
        table = ResultTable(("x",), ((0.1,), (0.2,)))
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        table.write_csv(p1)
        table.write_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_no_temp_litter(self, tmp_path):
        ResultTable(("x",), ((1.0,),)).write_csv(tmp_path / "out.csv")
        assert sorted(p.name for p in tmp_path.iterdir()) == ["out.csv"]


class TestChargedEpsilon:
    def test_half_is_zero(self):
        assert charged_epsilon(0.5) == 0.0

    def test_value_near_dp_bound(self):
        assert charged_epsilon(0.622) == pytest.approx(0.4980458971195918, abs=1e-12)

    def test_inverse_identity(self):
        for eps in (0.25, 0.5, 2.0):
            assert charged_epsilon(success_bound_dp(eps)) == pytest.approx(eps, abs=1e-12)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.1, 1.3):
            with pytest.raises(ValueError):
                charged_epsilon(bad)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(thetas=())
        with pytest.raises(ValueError):
            ExperimentConfig(databases=0)
        with pytest.raises(ValueError):
            ExperimentConfig(eps=-1.0)
        with pytest.raises(ValueError):
            ExperimentConfig(n=1)


SMALL_FIG2 = ExperimentConfig(
    n=30, thetas=(0.0, 0.09, 0.475), eps=0.5, databases=20, sanitizations=50, seed=7
)


class TestDpInsufficiency:
    def test_schemas_and_grid_order(self):
        suc, eps_table = run_dp_insufficiency(SMALL_FIG2)
        assert suc.columns == SUCCESS_COLUMNS
        assert eps_table.columns == CHARGED_COLUMNS
        assert suc.column("theta").tolist() == [0.0, 0.09, 0.475]

    def test_reproducible_bit_for_bit(self, tmp_path):
        a1, b1 = run_dp_insufficiency(SMALL_FIG2)
        a2, b2 = run_dp_insufficiency(SMALL_FIG2)
        assert a1 == a2 and b1 == b2
        p1, p2 = tmp_path / "1.csv", tmp_path / "2.csv"
        a1.write_csv(p1)
        a2.write_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_sb_respects_dp_bound(self):
        suc, _ = run_dp_insufficiency(SMALL_FIG2)
        trials = SMALL_FIG2.databases * SMALL_FIG2.sanitizations
        for p_sb in suc.column("suc_DP"):
            se = math.sqrt(p_sb * (1 - p_sb) / trials)
            assert p_sb <= 0.622 + 3 * se

    def test_ca_exploits_high_correlation(self):
        config = ExperimentConfig(
            n=30, thetas=(0.05,), eps=0.5, databases=40, sanitizations=100, seed=3
        )
        suc, eps_table = run_dp_insufficiency(config)
        assert suc.column("suc_BDP")[0] > suc.column("suc_DP")[0]
        assert eps_table.column("eps_BDP")[0] > 1.0

    def test_charged_matches_success_columns(self):
        suc, eps_table = run_dp_insufficiency(SMALL_FIG2)
        for (t1, p_sb, p_ca), (t2, e_sb, e_ca) in zip(suc.rows, eps_table.rows):
            assert t1 == t2
            assert e_sb == pytest.approx(charged_epsilon(p_sb))
            assert e_ca == pytest.approx(charged_epsilon(p_ca))


class TestNoisePrivacyComparison:
    def test_schema_and_ordering(self):
        config = ExperimentConfig(n=30, thetas=(0.35,), eps_grid=tuple(np.arange(1.0, 4.01, 0.25)))
        table = run_noise_privacy_comparison(config)
        assert table.columns == NOISE_COMPARISON_COLUMNS
        for _, rho_z, rho_c, rho_e in table.rows:
            assert rho_e < rho_c < rho_z

    def test_infeasible_budget_rows_flagged_not_dropped(self):
        config = ExperimentConfig(n=30, thetas=(0.05,), eps_grid=(0.25, 8.0))
        table = run_noise_privacy_comparison(config)
        assert len(table.rows) == 2
        assert math.isnan(table.rows[0][1])  # zhao column flagged
        assert not math.isnan(table.rows[0][3])
        assert not math.isnan(table.rows[1][1])

    def test_exact_column_is_the_bisection(self):
        config = ExperimentConfig(n=30, thetas=(0.35,), eps_grid=(1.0, 2.5))
        table = run_noise_privacy_comparison(config)
        for eps, row in zip(config.eps_grid, table.rows):
            assert row[3] == calibrate_symmetric_exact(0.35, eps)

    def test_requires_single_theta(self):
        with pytest.raises(ValueError):
            run_noise_privacy_comparison(ExperimentConfig(thetas=(0.1, 0.2)))


class TestReconstructionVsBound:
    def test_synthetic_schema_and_bound(self):
        config = ExperimentConfig(
            n=600, chain=BinaryMarkovChain(0.2, 0.35), eps_grid=(1.0, 2.0, 4.0),
            databases=1, sanitizations=2, seed=11,
        )
        table = run_reconstruction_vs_bound(config)
        assert table.columns == RECONSTRUCTION_COLUMNS
        for eps, acc, lstm, bound in table.rows:
            trials = config.n * config.sanitizations
            se = math.sqrt(max(acc * (1 - acc), 1e-12) / trials)
            assert acc <= bound + 3 * se
            assert math.isnan(lstm)  # no neural column supplied

    def test_real_bits_path_estimates_chain(self):
        chain = BinaryMarkovChain(0.15, 0.3)
        bits = sample(chain, 4000, seed=5)
        config = ExperimentConfig(n=30, eps_grid=(2.0,), sanitizations=1, seed=2)
        table = run_reconstruction_vs_bound(config, bits=bits)
        (eps, acc, lstm, bound) = table.rows[0]
        assert eps == 2.0
        assert 0.0 <= acc <= 1.0
        # bound uses the estimated chain, so it sits near the true-skew value
        est_skew_bound = bound
        assert 0.5 < est_skew_bound < 1.0

    def test_lstm_merge_and_sentinel(self, tmp_path):
        lstm_path = tmp_path / "lstm.csv"
        ResultTable(("eps", "lstm_accuracy"), ((1.0, 0.77),)).write_csv(lstm_path)
        config = ExperimentConfig(
            n=300, chain=BinaryMarkovChain(0.2, 0.35), eps_grid=(1.0, 2.0),
            sanitizations=1, seed=0,
        )
        table = run_reconstruction_vs_bound(config, lstm_csv=lstm_path)
        assert table.rows[0][2] == 0.77
        assert math.isnan(table.rows[1][2])

    def test_emit_bits_for_external_attacker(self, tmp_path):
        from bdpmc import read_bits

        config = ExperimentConfig(
            n=200, chain=BinaryMarkovChain(0.1, 0.15), eps_grid=(1.0, 2.0),
            sanitizations=1, seed=4,
        )
        run_reconstruction_vs_bound(config, emit_dir=tmp_path)
        truth = read_bits(tmp_path / "truth.bits")
        assert truth.size == 200
        for eps in (1.0, 2.0):
            z = read_bits(tmp_path / f"sanitized_eps{eps:g}.bits")
            assert z.size == 200

    def test_deterministic(self):
        config = ExperimentConfig(
            n=400, chain=BinaryMarkovChain(0.2, 0.35), eps_grid=(1.5,),
            sanitizations=2, seed=9,
        )
        assert run_reconstruction_vs_bound(config) == run_reconstruction_vs_bound(config)


class TestFeasibleRegion:
    def test_budget_monotone_nesting(self):
        chain = BinaryMarkovChain(0.2, 0.35)
        small = feasible_region(chain, 0.5, 40)
        large = feasible_region(chain, 2.0, 40)
        f_small = small.column("feasible")
        f_large = large.column("feasible")
        assert np.all(f_large >= f_small)
        assert f_large.sum() > f_small.sum()

    def test_heavy_noise_corner_always_feasible(self):
        chain = BinaryMarkovChain(0.2, 0.35)
        table = feasible_region(chain, 0.25, 30)
        assert table.columns == REGION_COLUMNS
        # the last grid point is the cell-centered corner near (0.5, 0.5)
        assert table.rows[-1][2] == 1.0

    def test_calibrated_point_sits_on_lower_boundary(self):
        chain = BinaryMarkovChain(0.2, 0.35)
        for eps in (0.5, 2.0):
            noise = calibrate_asymmetric(chain, eps)
            resolution = 100
            step = 0.5 / resolution
            assert max(log_lr_bound(chain, noise)) <= eps + 1e-9
            below = NoiseParams(noise.rho0, max(noise.rho1 - step, 1e-9))
            assert max(log_lr_bound(chain, below)) > eps
