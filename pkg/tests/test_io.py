import hashlib
import http.server
import io
import os
import shutil
import threading
import zipfile
from dataclasses import replace
from pathlib import Path

import pytest

from aslibkit.errors import FetchError, FormatError
from aslibkit.generate import GenSpec, generate
from aslibkit.io import RepoConfig, fetch_scenario, load_scenario, write_scenario
from aslibkit.scenario import validate_scenario
from builders import make_scenario


def tree_bytes(d: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.is_file()}


def test_mandatory_files_only(tmp_path):
    s = replace(make_scenario([[1.0, 2.0], [3.0, 4.0]]), readme=None)
    write_scenario(s, tmp_path / "s")
    assert sorted(os.listdir(tmp_path / "s")) == [
        "algorithm_runs.arff", "cv.arff", "description.txt", "feature_runstatus.arff", "feature_values.arff"]
    loaded = load_scenario(tmp_path / "s")
    assert loaded.feature_costs is None
    assert loaded.readme is None


def test_missing_cv_file_is_named(tmp_path):
    write_scenario(make_scenario([[1.0]]), tmp_path / "s")
    os.remove(tmp_path / "s" / "cv.arff")
    with pytest.raises(FormatError) as exc:
        load_scenario(tmp_path / "s")
    assert "cv.arff" in str(exc.value)


def test_parse_errors_are_annotated_with_file(tmp_path):
    write_scenario(make_scenario([[1.0]]), tmp_path / "s")
    p = tmp_path / "s" / "algorithm_runs.arff"
    p.write_text(p.read_text() + "i99,1\n")
    with pytest.raises(FormatError) as exc:
        load_scenario(tmp_path / "s")
    assert exc.value.code == "ARITY"
    assert exc.value.file == "algorithm_runs.arff"
    assert exc.value.line is not None


def test_generated_round_trip(tmp_path):
    s, _ = generate(GenSpec(n_instances=40, planted="clustered", presolve_rate=0.1, missing_rate=0.1, seed=5))
    write_scenario(s, tmp_path / "g")
    loaded = load_scenario(tmp_path / "g")
    assert loaded == s
    assert len(validate_scenario(loaded)) == 0


def test_write_load_write_is_byte_identical(tmp_path):
    s, _ = generate(GenSpec(n_instances=30, planted="complementary_pair", presolve_rate=0.2, missing_rate=0.2, seed=9))
    write_scenario(s, tmp_path / "a")
    write_scenario(load_scenario(tmp_path / "a"), tmp_path / "b")
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_no_cost_table_means_no_cost_file(tmp_path):
    s, _ = generate(GenSpec(n_instances=20, cost_scale=0.0, seed=1))
    write_scenario(s, tmp_path / "s")
    assert not (tmp_path / "s" / "feature_costs.arff").exists()
    with_costs, _ = generate(GenSpec(n_instances=20, seed=1))
    write_scenario(with_costs, tmp_path / "t")
    write_scenario(s, tmp_path / "t")
    assert not (tmp_path / "t" / "feature_costs.arff").exists()


def test_maximised_measure_is_negated_in_memory(tmp_path):
    s = make_scenario([[1.0, 2.0]])
    write_scenario(s, tmp_path / "s")
    d = tmp_path / "s" / "description.txt"
    d.write_text(d.read_text().replace("maximize: [false]", "maximize: [true]").replace(
        "performance_type: [runtime]", "performance_type: [solution_quality]"))
    loaded = load_scenario(tmp_path / "s")
    assert loaded.meta.measures[0].maximize
    assert [r.values[0] for r in loaded.runs] == [-1.0, -2.0]
    write_scenario(loaded, tmp_path / "t")
    assert "i00,1,a0,1,ok" in (tmp_path / "t" / "algorithm_runs.arff").read_text()


def test_repetitions_survive_round_trip(tmp_path):
    from aslibkit.scenario import RunRecord

    s = make_scenario([[4.0]])
    s = replace(s, runs=s.runs + (RunRecord("i00", 2, "a0", (6.0,), "ok"),))
    write_scenario(s, tmp_path / "s")
    assert load_scenario(tmp_path / "s") == s


# --------------------------------------------------------------------------- fetching


class _Quiet(http.server.SimpleHTTPRequestHandler):
    def log_message(self, *args):
        pass


@pytest.fixture
def repo(tmp_path):
    """A local static HTTP server standing in for the scenario repository."""
    root = tmp_path / "www"
    root.mkdir()
    s, _ = generate(GenSpec(n_instances=15, seed=2))
    write_scenario(s, root / "TREE-1")
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        for p in sorted((root / "TREE-1").iterdir()):
            zf.write(p, f"ZIPPED-1/{p.name}")
    (root / "ZIPPED-1.zip").write_bytes(buf.getvalue())
    (root / "ZIPPED-1.zip.sha256").write_text(hashlib.sha256(buf.getvalue()).hexdigest() + "  ZIPPED-1.zip\n")
    (root / "BADSUM-1.zip").write_bytes(buf.getvalue())
    (root / "BADSUM-1.zip.sha256").write_text("0" * 64 + "\n")

    handler = lambda *a, **kw: _Quiet(*a, directory=str(root), **kw)  # noqa: E731
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, f"http://127.0.0.1:{server.server_address[1]}", s
    server.shutdown()


def test_fetch_zip_and_cache_hit(repo, tmp_path, monkeypatch):
    monkeypatch.delenv("ASLIBKIT_CACHE", raising=False)
    server, url, s = repo
    cfg = RepoConfig(base_url=url, cache_dir=tmp_path / "cache", timeout=5)
    path = fetch_scenario("ZIPPED-1", cfg)
    assert load_scenario(path) == s
    server.shutdown()
    assert fetch_scenario("ZIPPED-1", cfg) == path


def test_fetch_directory_tree(repo, tmp_path, monkeypatch):
    monkeypatch.delenv("ASLIBKIT_CACHE", raising=False)
    _, url, s = repo
    path = fetch_scenario("TREE-1", RepoConfig(base_url=url, cache_dir=tmp_path / "cache", timeout=5))
    assert load_scenario(path) == s


def test_fetch_unknown_name(repo, tmp_path, monkeypatch):
    monkeypatch.delenv("ASLIBKIT_CACHE", raising=False)
    _, url, _ = repo
    with pytest.raises(FetchError) as exc:
        fetch_scenario("NOPE-2000", RepoConfig(base_url=url, cache_dir=tmp_path / "cache", timeout=5))
    assert exc.value.code == "NOT_FOUND"


def test_fetch_checksum_mismatch(repo, tmp_path, monkeypatch):
    monkeypatch.delenv("ASLIBKIT_CACHE", raising=False)
    _, url, _ = repo
    with pytest.raises(FetchError) as exc:
        fetch_scenario("BADSUM-1", RepoConfig(base_url=url, cache_dir=tmp_path / "cache", timeout=5))
    assert exc.value.code == "CHECKSUM"
    assert not (tmp_path / "cache" / "BADSUM-1").exists()


def test_fetch_network_error(tmp_path, monkeypatch):
    monkeypatch.delenv("ASLIBKIT_CACHE", raising=False)
    with pytest.raises(FetchError) as exc:
        fetch_scenario("X", RepoConfig(base_url="http://127.0.0.1:9", cache_dir=tmp_path / "c", timeout=2))
    assert exc.value.code == "NETWORK"


def test_cache_env_override(repo, tmp_path, monkeypatch):
    _, url, _ = repo
    monkeypatch.setenv("ASLIBKIT_CACHE", str(tmp_path / "envcache"))
    path = fetch_scenario("TREE-1", RepoConfig(base_url=url, cache_dir=tmp_path / "ignored", timeout=5))
    assert Path(path).parent == tmp_path / "envcache"
    assert not (tmp_path / "ignored").exists()


def test_concurrent_fetches_agree(repo, tmp_path, monkeypatch):
    monkeypatch.delenv("ASLIBKIT_CACHE", raising=False)
    _, url, _ = repo
    cfg = RepoConfig(base_url=url, cache_dir=tmp_path / "cache", timeout=5)
    out = []
    threads = [threading.Thread(target=lambda: out.append(fetch_scenario("ZIPPED-1", cfg))) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(out)) == 1 and len(out) == 4
    shutil.rmtree(tmp_path / "cache")
