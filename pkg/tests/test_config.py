import pytest

from stepcarnot.config import (
    ConfigError,
    RunConfig,
    config_from_mapping,
    load_config,
    parse_config,
    parse_override,
)

MINIMAL_DIP = """
kind = "dip"
beta = 0.1
E0 = 10.0
EN = 6.0
N = 20
tau = 1.0
control = "power"
"""


def test_minimal_dip_config():
    cfg = parse_config(MINIMAL_DIP)
    assert isinstance(cfg, RunConfig)
    assert cfg.bath().beta == pytest.approx(0.1)
    s = cfg.dip_schedule()
    assert s.N == 20 and s.tau == 1.0
    assert s.delta.tolist() == [0.0, -4.0]


def test_defaults_are_valid():
    assert parse_config("").kind == "dip"
    assert parse_config('kind = "cycle"').cycle_spec().T_H == 10.0


def test_zero_exponent_rejected():
    with pytest.raises(ConfigError, match="n > 0 required"):
        parse_config(MINIMAL_DIP + "n = 0\n")


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key.*Nsteps"):
        parse_config(MINIMAL_DIP + "Nsteps = 5\n")


def test_parse_error_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config('kind = "dip"\nN = 20\nbeta = = 0.1\n')


def test_tables_rejected():
    with pytest.raises(ConfigError, match="flat"):
        parse_config("[hot]\nT = 10\n")


@pytest.mark.parametrize(
    "extra, field",
    [
        ("N_values = []", "N_values"),
        ("N_values = [20, 10]", "N_values"),
        ("N_values = [20, 20]", "N_values"),
        ("N_values = [20.5]", "N"),
    ],
)
def test_bad_sweeps_rejected(extra, field):
    with pytest.raises(ConfigError, match=field):
        parse_config('kind = "sweep-n"\n' + extra)


def test_sweep_n_requires_range():
    with pytest.raises(ConfigError, match="N_values"):
        parse_config('kind = "sweep-n"')


@pytest.mark.parametrize(
    "text, field",
    [
        ('kind = "spline"', "kind"),
        ('mode = "fast"', "mode"),
        ("tau = -1.0", "tau"),
        ("N = 0", "N"),
        ("N = 2.5", "N"),
        ("T = 1.0\nbeta = 1.0", "T/beta"),
        ('control = "spline"', "control"),
        ("E0 = [0, 1]\nEN = 3", "E0/EN"),
        ('kind = "cycle"\nT_C = 20.0', "cycle"),
        ('kind = "emp-curve"\neta_C_values = [0.5, 1.0]', "eta_C_values"),
        ('kind = "sweep-nh"\ncontrol_H = "exponential"\nb_H = -1.0\nn_H_values = [1.0]', "n_H_values"),
    ],
)
def test_validation_names_field(text, field):
    with pytest.raises(ConfigError, match=f"^{field}"):
        parse_config(text)


@pytest.mark.filterwarnings("ignore::stepcarnot.model.HighTemperatureWarning")
def test_tau_auto():
    cfg = parse_config(MINIMAL_DIP.replace("tau = 1.0", 'tau = "auto"'))
    assert cfg.tau is None
    assert cfg.dip_schedule().tau == pytest.approx(1.0)


def test_multilevel_levels():
    cfg = parse_config("E0 = [0, 4, 9]\nEN = [0, 3, 6]\nN = 5")
    assert cfg.dip_schedule().M == 3


def test_fig2_recipe(recipes_dir):
    cfg = load_config(recipes_dir / "fig2.toml")
    s = cfg.dip_schedule()
    assert cfg.kind == "sweep-n"
    assert cfg.bath().beta == pytest.approx(0.1)
    assert cfg.bath().gamma == 1.0
    assert s.energies[1, 0] == 10.0 and s.delta[1] == -4.0
    assert s.tau == 1.0
    assert min(cfg.N_values) == 20 and max(cfg.N_values) == 120
    assert cfg.n_values == (1.0, 2.0, 4.0)


def test_fig4_recipe(recipes_dir):
    cfg = load_config(recipes_dir / "fig4.toml")
    assert cfg.kind == "emp-curve"
    assert cfg.n_H_values == (1.0, 10.0, 100.0)
    assert cfg.gamma_H == cfg.gamma_C


def test_override_precedence(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL_DIP)
    assert load_config(path).N == 20
    assert load_config(path, {"N": 7}).N == 7
    assert load_config(None, {"N": 7}).beta is None


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/run.toml")


def test_parse_override():
    assert parse_override("N=40") == ("N", 40)
    assert parse_override("beta = 0.05") == ("beta", 0.05)
    assert parse_override("control=power") == ("control", "power")
    assert parse_override("N_values=[1, 2]") == ("N_values", [1, 2])
    with pytest.raises(ConfigError):
        parse_override("N")


def test_mapping_type_errors():
    with pytest.raises(ConfigError, match="^kind"):
        config_from_mapping({"kind": 3})
    with pytest.raises(ConfigError, match="^beta"):
        config_from_mapping({"beta": "hot"})
    with pytest.raises(ConfigError, match="^seed"):
        config_from_mapping({"seed": True})
