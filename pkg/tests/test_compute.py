import pytest

from labloop.canonical import canonical_dumps, strip_volatile
from labloop.compute import (
    ComputeClient,
    ComputeServer,
    InProcessBackend,
    NotFinished,
    Overloaded,
    RemoteBackend,
    SchemaRejected,
    UnknownJob,
    select_backend,
)
from labloop.compute.backend import COMPUTE_URL_ENV
from labloop.frontend import (
    MaterialRegistry,
    assemble_units,
    canonicalize,
    resolve_materials,
    resolve_spec,
)
from labloop.frontend.types import ExperimentSpec, Hypothesis, MaterialRecord

REGISTRY = MaterialRegistry.builtin()


def build_spec(text="The bulk modulus of Kr-fcc is greater than that of Ar-fcc",
               n_trials=3, overrides=None) -> ExperimentSpec:
    canonical = canonicalize(Hypothesis(id="h", text=text, submitted_at="t"))
    materials = resolve_materials(canonical, REGISTRY)
    return assemble_units(canonical, materials, resolve_spec(canonical, overrides), n_trials)


def corrupt_one_unit(spec: ExperimentSpec, index=0) -> ExperimentSpec:
    doc = spec.to_dict()
    doc["units"][index]["material"]["cif_text"] = "garbage, not a cif\n"
    return ExperimentSpec.from_dict(doc)


@pytest.fixture(scope="module")
def server():
    srv = ComputeServer(workers=4).start()
    yield srv
    srv.stop()


@pytest.fixture(scope="module")
def client(server):
    return ComputeClient(server.url)


class TestJobLifecycle:
    def test_submit_and_finish(self, client):
        spec = build_spec(n_trials=3)
        job_id = client.submit(spec)
        status = client.status(job_id)
        assert status["total_units"] == 6
        assert status["state"] in ("queued", "running", "done")
        results = client.wait(job_id)
        status = client.status(job_id)
        assert status == {"state": "done", "completed_units": 6, "total_units": 6}
        assert [r["unit_id"] for r in results] == [
            "m0-t0", "m0-t1", "m0-t2", "m1-t0", "m1-t1", "m1-t2"]

    def test_distinct_job_ids(self, client):
        spec = build_spec(n_trials=1)
        assert client.submit(spec) != client.submit(spec)

    def test_schema_rejected_names_missing_field(self, client):
        doc = build_spec(n_trials=1).to_dict()
        del doc["schema_version"]
        with pytest.raises(SchemaRejected) as err:
            client.submit(doc)
        assert any("schema_version" in d for d in err.value.diagnostics)

    def test_unknown_job(self, client):
        with pytest.raises(UnknownJob):
            client.status("job-does-not-exist")
        with pytest.raises(UnknownJob):
            client.results("job-does-not-exist")

    def test_results_before_done_conflict(self, server):
        # bypass the queue runner by querying a job parked behind a big one
        big = build_spec(n_trials=6)
        small = build_spec(n_trials=1)
        c = ComputeClient(server.url)
        first = c.submit(big)
        second = c.submit(small)
        try:
            c.results(second)
        except NotFinished:
            pass  # observed the conflict window
        c.wait(first)
        c.wait(second)

    def test_results_immutable_across_fetches(self, client):
        spec = build_spec(n_trials=2)
        job_id = client.submit(spec)
        client.wait(job_id)
        assert client.results(job_id) == client.results(job_id)

    def test_per_unit_failure_isolation(self, client):
        spec = corrupt_one_unit(build_spec(n_trials=3), index=0)
        job_id = client.submit(spec)
        results = client.wait(job_id)
        failures = [r for r in results if "stage" in r]
        successes = [r for r in results if "properties" in r]
        assert len(failures) == 1
        assert failures[0]["stage"] == "parse"
        assert failures[0]["unit_id"] == "m0-t0"
        assert len(successes) == 5

    def test_overload_guard(self):
        srv = ComputeServer(workers=1, queue_bound=1).start()
        try:
            c = ComputeClient(srv.url)
            ids = []
            with pytest.raises(Overloaded):
                for _ in range(8):  # bound 1 + 1 running slot
                    ids.append(c.submit(build_spec(n_trials=4)))
            for job_id in ids:
                c.wait(job_id)
        finally:
            srv.stop()


class TestWireEquivalence:
    def test_remote_equals_in_process(self, server):
        spec = build_spec(n_trials=2)
        local = InProcessBackend().run_spec(spec)
        remote = RemoteBackend(server.url).run_spec(spec)
        assert canonical_dumps(strip_volatile(local)) == canonical_dumps(strip_volatile(remote))

    def test_remote_equals_in_process_with_failures(self, server):
        spec = corrupt_one_unit(build_spec(n_trials=2), index=1)
        local = InProcessBackend().run_spec(spec)
        remote = RemoteBackend(server.url).run_spec(spec)
        assert canonical_dumps(strip_volatile(local)) == canonical_dumps(strip_volatile(remote))

    def test_scheduling_independence(self):
        spec = build_spec(n_trials=3)
        one = InProcessBackend(workers=1).run_spec(spec)
        many = InProcessBackend(workers=8).run_spec(spec)
        assert canonical_dumps(strip_volatile(one)) == canonical_dumps(strip_volatile(many))


class TestBackendSelection:
    def test_env_var_selects_remote(self, monkeypatch, server):
        monkeypatch.setenv(COMPUTE_URL_ENV, server.url)
        backend = select_backend()
        assert isinstance(backend, RemoteBackend)

    def test_absence_selects_in_process(self, monkeypatch):
        monkeypatch.delenv(COMPUTE_URL_ENV, raising=False)
        assert isinstance(select_backend(), InProcessBackend)

    def test_progress_callback_covers_all_units(self):
        spec = build_spec(n_trials=2)
        seen = []
        InProcessBackend().run_spec(spec, on_unit=lambda doc: seen.append(doc["unit_id"]))
        assert sorted(seen) == [u.unit_id for u in spec.units]
