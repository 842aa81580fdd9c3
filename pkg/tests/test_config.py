import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdwtails import config, fixtures
from vdwtails.config import AtomSource, ConfigError, GridSpec, RunConfig

BASE = """\
[units]
c = 137.035999

[atom.A]
levels = [["m", -0.1], ["n", 0.0], ["v", 0.4]]
dipoles = [["n", "m", 1.0, 0.0, 0.0], ["n", "v", 0.0, 1.0, 0.0]]

[atom.B]
levels = [["g", 0.0, "S"], ["p", 0.5]]
dipoles = [["g", "p", 0.0, 0.0, 1.0]]

[pair]
ref_a = "n"
ref_b = "g"

[grid]
min = 10.0
max = 1000.0
points = 5
spacing = "log"
"""


def test_parse_base():
    cfg = config.loads(BASE)
    assert cfg.atom_a.model == fixtures.three_level_atom().__class__.build(
        [("m", -0.1), ("n", 0.0), ("v", 0.4)],
        [("n", "m", (1.0, 0.0, 0.0)), ("n", "v", (0.0, 1.0, 0.0))],
    )
    assert cfg.channels == ("wick", "pole", "width")
    assert cfg.grid.values() == pytest.approx([10.0, 31.622776601683793, 100.0, 316.22776601683796, 1000.0])
    assert cfg.pair().ref_b == "g"


def test_round_trip_is_idempotent():
    cfg = config.loads(BASE)
    text = config.dumps(cfg)
    again = config.loads(text)
    assert again == cfg
    assert config.dumps(again) == text
    assert again.sha256() == cfg.sha256()


@settings(max_examples=40)
@given(
    st.floats(1e-3, 1e3),
    st.floats(1.001, 1e3),
    st.integers(2, 500),
    st.sampled_from(["log", "linear"]),
    st.lists(st.sampled_from(["wick", "pole", "width"]), unique=True),
    st.floats(1.0, 1e3),
)
def test_round_trip_property(gmin, span, points, spacing, channels, c):
    cfg = RunConfig(
        atom_a=AtomSource(fixtures.three_level_atom()),
        atom_b=AtomSource(fixtures.two_level_atom()),
        ref_a="n",
        ref_b="g",
        grid=GridSpec(gmin, gmin * span, points, spacing),
        channels=tuple(ch for ch in config.CHANNELS if ch in channels),
        c=c,
        quadrature=(("rel_tol", 1e-9),),
    )
    text = config.dumps(cfg)
    parsed = config.loads(text)
    assert parsed == cfg
    assert config.dumps(parsed) == text


def _error_line(text):
    with pytest.raises(ConfigError) as info:
        config.loads(text)
    return info.value.line, str(info.value)


@pytest.mark.parametrize(
    "old, new, line, fragment",
    [
        ("min = 10.0", "min = 1e4", 18, "smaller than grid.max"),
        ("points = 5", "points = 1", 19, "at least 2"),
        ('spacing = "log"', 'spacing = "cubic"', 20, "spacing"),
        ('ref_a = "n"', 'ref_a = "q"', 13, "unknown level"),
        ("c = 137.035999", "c = -1.0", 2, "positive"),
    ],
)
def test_line_numbered_errors(old, new, line, fragment):
    got, message = _error_line(BASE.replace(old, new))
    assert got == line
    assert fragment in message
    assert f"config:{line}:" in message


def test_bad_channel_and_unknown_keys():
    _, msg = _error_line(BASE + '\n[output]\nchannels = ["wick", "phase"]\n')
    assert "phase" in msg
    line, msg = _error_line(BASE.replace("[grid]", "[grid]\nstep = 3"))
    assert "unknown key 'step'" in msg and line == 17
    _, msg = _error_line(BASE + "\n[extras]\na = 1\n")
    assert "unknown section" in msg


def test_toml_syntax_error_reports_line():
    _, msg = _error_line(BASE.replace("points = 5", "points = "))
    assert "line 19" in msg


def test_identical_pair_may_omit_atom_b():
    text = BASE.replace(
        '[atom.B]\nlevels = [["g", 0.0, "S"], ["p", 0.5]]\ndipoles = [["g", "p", 0.0, 0.0, 1.0]]\n', ""
    )
    text = text.replace('ref_b = "g"', 'ref_b = "m"\nidentical = true')
    cfg = config.loads(text)
    assert cfg.atom_b is None and cfg.pair().atom_b == cfg.atom_a.model
    assert config.loads(config.dumps(cfg)) == cfg
    _, msg = _error_line(text.replace("identical = true", "identical = false"))
    assert "[atom.B] is required" in msg


def test_atom_file_reference(tmp_path):
    (tmp_path / "b.toml").write_text('levels = [["g", 0.0], ["p", 0.5]]\ndipoles = [["g", "p", 0.0, 0.0, 1.0]]\n')
    text = BASE.replace(
        'levels = [["g", 0.0, "S"], ["p", 0.5]]\ndipoles = [["g", "p", 0.0, 0.0, 1.0]]', 'file = "b.toml"'
    )
    (tmp_path / "run.toml").write_text(text)
    cfg = config.load(tmp_path / "run.toml")
    assert cfg.atom_b.file == "b.toml"
    assert cfg.atom_b.model.labels == ("g", "p")
    assert 'file = "b.toml"' in config.dumps(cfg)
    with pytest.raises(ConfigError, match="cannot read atom file"):
        config.loads(text.replace("b.toml", "missing.toml"), base_dir=tmp_path)


def test_bad_level_entry():
    _, msg = _error_line(BASE.replace('["v", 0.4]', '["v", "high"]'))
    assert "bad level entry" in msg
