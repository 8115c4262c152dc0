import math

from hedgecut.harness import TrialRecord
from hedgecut.report import render_report

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def fake_records():
    out = []
    for n in (5, 10, 20):
        for k in range(4):
            out.append(
                TrialRecord(
                    "heid1", f"n{n}-s0-g{k}", n, n, n, 0.01 * n + 0.001 * k,
                    1.0 + k, 0.5, False, True,
                )
            )
            out.append(
                TrialRecord(
                    "edgeid_exact", f"n{n}-s0-g{k}", n, n, n, 0.1 * n,
                    None if k == 3 else 1.0, None, k == 3, k != 3,
                )
            )
    # one infinite cost row, must not break the cost panel
    out.append(
        TrialRecord("heid2", "n5-s0-g0", 5, 5, 5, 0.02, math.inf, 0.5, False, True)
    )
    return out


def test_writes_three_png_files(tmp_path):
    paths = render_report(fake_records(), str(tmp_path))
    assert [p.rsplit("/", 1)[1] for p in paths] == [
        "runtimes.png",
        "costs.png",
        "timeout_fraction.png",
    ]
    for p in paths:
        data = open(p, "rb").read()
        assert data.startswith(PNG_MAGIC)
        assert len(data) > 1000


def test_prefix_lands_in_filenames(tmp_path):
    paths = render_report(fake_records(), str(tmp_path), prefix="results.")
    assert [p.rsplit("/", 1)[1] for p in paths] == [
        "results.runtimes.png",
        "results.costs.png",
        "results.timeout_fraction.png",
    ]


def test_creates_missing_directory(tmp_path):
    target = tmp_path / "sub" / "dir"
    paths = render_report(fake_records(), str(target))
    assert target.is_dir()
    assert all(p.startswith(str(target)) for p in paths)


def test_empty_record_set_still_renders(tmp_path):
    paths = render_report([], str(tmp_path))
    assert len(paths) == 3
    for p in paths:
        assert open(p, "rb").read().startswith(PNG_MAGIC)
