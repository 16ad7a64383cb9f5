import pytest
from fastapi.testclient import TestClient

from cynote.api import create_app
from cynote.service import CynoteService

from .conftest import FIXTURES, PASSWORD, make_config


@pytest.fixture
def client(tmp_path, clock):
    service = CynoteService(
        make_config(tmp_path, server={"max_upload_mib": 1}), clock=clock
    )
    with TestClient(create_app(service), raise_server_exceptions=False) as test_client:
        test_client.service = service
        yield test_client
    service.close()


def login(client, username="ng", password=PASSWORD, create=False):
    if create:
        response = client.post(
            "/cynote/account/newaccount",
            json={"username": username, "password": password},
        )
        assert response.status_code == 200, response.text
    response = client.post(
        "/cynote/account/login", json={"username": username, "password": password}
    )
    assert response.status_code == 200, response.text
    token = response.json()["token"]
    return {"Authorization": f"Bearer {token}"}


class TestAuthGates:
    def test_unauthenticated_listing_is_401(self, client):
        assert client.get("/cynote/cynote/list_entries").status_code == 401

    def test_unauthenticated_mutation_is_401(self, client):
        assert client.post("/cynote/cynote/new_notebook", json={"title": "x"}).status_code == 401

    def test_garbage_token_is_401(self, client):
        response = client.get(
            "/cynote/cynote/list_entries",
            headers={"Authorization": "Bearer feedfeedfeed"},
        )
        assert response.status_code == 401

    def test_login_logout_cycle(self, client):
        headers = login(client, create=True)
        assert client.get("/cynote/cynote/list_entries", headers=headers).status_code == 200
        assert client.post("/cynote/account/logout", headers=headers).status_code == 200
        assert client.get("/cynote/cynote/list_entries", headers=headers).status_code == 401

    def test_bad_credentials_are_401(self, client):
        login(client, create=True)
        response = client.post(
            "/cynote/account/login", json={"username": "ng", "password": "nope-nope"}
        )
        assert response.status_code == 401
        assert response.json()["code"] == "invalid_credentials"

    def test_stale_password_yields_403_with_change_route(self, tmp_path, clock):
        # session must outlive the aging threshold to hit the dispatch gate
        service = CynoteService(
            make_config(tmp_path, session={"ttl_minutes": 150 * 24 * 60}), clock=clock
        )
        with TestClient(create_app(service)) as long_client:
            headers = login(long_client, create=True)
            clock.advance(days=91)
            response = long_client.get("/cynote/cynote/list_entries", headers=headers)
            assert response.status_code == 403
            body = response.json()
            assert body["code"] == "password_expired"
            assert body["change_password_route"] == "/cynote/account/changepassword"
            # login now also refuses and points at the change-password flow
            response = long_client.post(
                "/cynote/account/login", json={"username": "ng", "password": PASSWORD}
            )
            assert response.status_code == 403
            assert response.json()["code"] == "password_expired"
            # recovery: change password (no session needed), then log in again
            response = long_client.post(
                "/cynote/account/changepassword",
                json={
                    "username": "ng",
                    "old_password": PASSWORD,
                    "new_password": "freshpass1",
                },
            )
            assert response.status_code == 200
            login(long_client, password="freshpass1")
        service.close()


class TestValidation:
    def test_missing_entry_fields_named(self, client):
        headers = login(client, create=True)
        client.post("/cynote/cynote/new_notebook", json={"title": "nb"}, headers=headers)
        response = client.post(
            "/cynote/cynote/new_entry", json={"notebook_id": 1}, headers=headers
        )
        assert response.status_code == 422
        assert set(response.json()["fields"]) == {"title", "description"}

    def test_non_integer_notebook_id(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/cynote/new_entry",
            json={"notebook_id": "later", "title": "t", "description": "d"},
            headers=headers,
        )
        assert response.status_code == 422
        assert "notebook_id" in response.json()["fields"]

    def test_oversized_attachment_is_413(self, client):
        headers = login(client, create=True)
        client.post("/cynote/cynote/new_notebook", json={"title": "nb"}, headers=headers)
        big = b"x" * (1024 * 1024 + 1)
        response = client.post(
            "/cynote/cynote/new_entry",
            data={"notebook_id": "1", "title": "t", "description": "d"},
            files={"file": ("big.bin", big)},
            headers=headers,
        )
        assert response.status_code == 413

    def test_unknown_notebook_is_404(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/cynote/new_entry",
            json={"notebook_id": 5, "title": "t", "description": "d"},
            headers=headers,
        )
        assert response.status_code == 404

    def test_archived_notebook_is_409(self, client):
        headers = login(client, create=True)
        client.post("/cynote/cynote/new_notebook", json={"title": "nb"}, headers=headers)
        client.post("/cynote/cynote/archive", json={"notebook_id": 1}, headers=headers)
        response = client.post(
            "/cynote/cynote/new_entry",
            json={"notebook_id": 1, "title": "t", "description": "d"},
            headers=headers,
        )
        assert response.status_code == 409
        assert response.json()["code"] == "archived_notebook"

    def test_duplicate_username_is_409(self, client):
        login(client, create=True)
        response = client.post(
            "/cynote/account/newaccount",
            json={"username": "ng", "password": "whatever12"},
        )
        assert response.status_code == 409


class TestNotebookFlows:
    def test_entry_with_multipart_attachment(self, client):
        headers = login(client, create=True)
        client.post("/cynote/cynote/new_notebook", json={"title": "nb"}, headers=headers)
        response = client.post(
            "/cynote/cynote/new_entry",
            data={
                "notebook_id": "1",
                "title": "gel photo",
                "description": "lane 3 smear",
                "keywords": "gel, pcr",
            },
            files={"file": ("gel.png", b"\x89PNG...")},
            headers=headers,
        )
        assert response.status_code == 200, response.text
        body = response.json()
        assert body["file"]["filename"] == "gel.png"
        assert body["keywords"] == ["gel", "pcr"]

    def test_entry_thread_and_toc(self, client):
        headers = login(client, create=True)
        client.post("/cynote/cynote/new_notebook", json={"title": "nb"}, headers=headers)
        client.post(
            "/cynote/cynote/new_entry",
            json={"notebook_id": 1, "title": "t", "description": "d"},
            headers=headers,
        )
        client.post(
            "/cynote/cynote/new_comment",
            json={"entry_id": 1, "text": "looks good"},
            headers=headers,
        )
        client.post("/cynote/cynote/notarize", json={"entry_id": 1}, headers=headers)
        thread = client.get("/cynote/cynote/entry?entry_id=1", headers=headers).json()
        assert thread["entry"]["title"] == "t"
        assert [c["text"] for c in thread["comments"]] == ["looks good"]
        assert thread["notarizations"][0]["notary"] == "ng"
        toc = client.get("/cynote/cynote/toc?notebook_id=1", headers=headers).json()
        assert toc == [
            {
                "entry_id": 1,
                "title": "t",
                "created_utc": thread["entry"]["created_utc"],
            }
        ]

    def test_signatures_and_verify(self, client):
        headers = login(client, create=True)
        client.post("/cynote/cynote/new_notebook", json={"title": "nb"}, headers=headers)
        client.post(
            "/cynote/cynote/new_entry",
            json={"notebook_id": 1, "title": "t", "description": "d"},
            headers=headers,
        )
        response = client.post("/cynote/cynote/generate_signatures", headers=headers)
        assert response.json() == {"batch_id": 1}
        report = client.get(
            "/cynote/cynote/verify?record_kind=entry&record_id=1", headers=headers
        ).json()
        assert report["status"] == "consistent"


class TestAnalysisRoutes:
    def test_primer_analyze_stores_result(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/primer/analyze",
            json={
                "left": "AATATTCTATCTA",
                "right": "GCTATCTACTA",
                "monovalent_mM": 50.0,
                "divalent_mM": 2.5,
                "primer_concentration_M": 4e-6,
            },
            headers=headers,
        )
        assert response.status_code == 200, response.text
        payload = dict(tuple(pair) for pair in response.json()["payload"])
        assert payload["Left primer Tm (C)"] == "30 to 30"
        results = client.get("/cynote/cynote/results", headers=headers).json()
        assert len(results) == 1 and results[0]["kind"] == "primer"

    def test_sequence_transform(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/sequence/transform",
            json={"operation": "reverse_complement", "sequence": "ATGC"},
            headers=headers,
        )
        payload = dict(tuple(pair) for pair in response.json()["payload"])
        assert payload["output"] == "GCAT"

    def test_sequence_protein(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/sequence/protein",
            json={"sequence": "MKWVTFISLLFLFSSAYS"},
            headers=headers,
        )
        payload = dict(tuple(pair) for pair in response.json()["payload"])
        assert float(payload["Molecular weight (Da)"]) > 0

    def test_sequence_restriction(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/sequence/restriction",
            json={"sequence": "GAATTC", "enzymes": ["EcoRI"]},
            headers=headers,
        )
        payload = dict(tuple(pair) for pair in response.json()["payload"])
        assert payload["EcoRI"] == "site at 1, cut after base 1"

    def test_sequence_blast_replay(self, client):
        headers = login(client, create=True)
        cache_dir = client.service.blast.cache_dir
        cache_dir.mkdir(parents=True, exist_ok=True)
        from cynote.blast import BlastRequest

        request = BlastRequest("blastn", "nt", "ACGTACGTACGTACGTACGTACGT")
        (cache_dir / f"{request.digest()}.xml").write_text(
            (FIXTURES / "blast_response.xml").read_text()
        )
        response = client.post(
            "/cynote/sequence/blast",
            json={"program": "blastn", "database": "nt", "sequence": request.sequence},
            headers=headers,
        )
        assert response.status_code == 200, response.text
        assert response.json()["from_cache"] is True
        assert len(response.json()["hits"]) == 2

    def test_sequence_blast_without_cache_is_503(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/sequence/blast",
            json={"program": "blastn", "database": "nt", "sequence": "AAAACCCCGGGG"},
            headers=headers,
        )
        assert response.status_code == 503

    def test_statistics_descriptive(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/statistics/descriptive",
            json={"values": [1, 2, 3, 4, 5]},
            headers=headers,
        )
        body = response.json()
        assert body["mean"] == 3.0 and body["variance"] == 2.5

    def test_statistics_table2x2_bundle(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/statistics/table2x2",
            json={"a": 10, "b": 20, "c": 20, "d": 10},
            headers=headers,
        )
        body = response.json()
        assert body["chi_square"]["statistic"] == pytest.approx(20 / 3)
        assert body["chi_square_yates"]["statistic"] == pytest.approx(5.4)

    def test_statistics_results_never_persisted(self, client):
        headers = login(client, create=True)
        client.post(
            "/cynote/statistics/descriptive",
            json={"values": [1, 2, 3]},
            headers=headers,
        )
        assert client.get("/cynote/cynote/results", headers=headers).json() == []

    def test_statistics_rxc_and_gof(self, client):
        headers = login(client, create=True)
        response = client.post(
            "/cynote/statistics/tablerxc",
            json={"counts": [[20, 30, 50], [30, 20, 50]]},
            headers=headers,
        )
        assert response.json()["chi_square"]["statistic"] == pytest.approx(4.0)
        response = client.post(
            "/cynote/statistics/tablerxc",
            json={"observed": [50, 30, 20], "expected_proportions": [1 / 3, 1 / 3, 1 / 3]},
            headers=headers,
        )
        assert response.json()["statistic"] == pytest.approx(14.0)


class TestBackupRoute:
    def test_backup_returns_manifest(self, client):
        headers = login(client, create=True)
        response = client.post("/cynote/savedatabase/backup", headers=headers)
        assert response.status_code == 200, response.text
        body = response.json()
        assert body["remote_dir"] == "cynote_database"
        assert body["dump_name"].endswith(".txt")


class TestRouteTableAudit:
    def test_no_update_or_delete_content_routes(self, client):
        app = client.app
        forbidden_verbs = ("update", "delete", "remove", "edit", "amend")
        for route in app.routes:
            methods = getattr(route, "methods", None)
            if not methods:
                continue
            assert methods <= {"GET", "POST", "HEAD", "OPTIONS"}, route.path
            path = route.path.lower()
            assert not any(verb in path for verb in forbidden_verbs), route.path

    def test_every_controller_route_present(self, client):
        paths = {route.path for route in client.app.routes if hasattr(route, "methods")}
        expected = {
            "/cynote/account/newaccount",
            "/cynote/account/login",
            "/cynote/account/logout",
            "/cynote/account/changepassword",
            "/cynote/account/authorize",
            "/cynote/account/deauthorize",
            "/cynote/cynote/new_notebook",
            "/cynote/cynote/new_entry",
            "/cynote/cynote/new_comment",
            "/cynote/cynote/list_entries",
            "/cynote/cynote/toc",
            "/cynote/cynote/notarize",
            "/cynote/cynote/archive",
            "/cynote/cynote/unarchive",
            "/cynote/cynote/generate_signatures",
            "/cynote/cynote/verify",
            "/cynote/cynote/results",
            "/cynote/primer/analyze",
            "/cynote/sequence/transform",
            "/cynote/sequence/protein",
            "/cynote/sequence/restriction",
            "/cynote/sequence/blast",
            "/cynote/statistics/descriptive",
            "/cynote/statistics/regression",
            "/cynote/statistics/table2x2",
            "/cynote/statistics/tablerxc",
            "/cynote/savedatabase/backup",
        }
        assert expected <= paths

    def test_every_mutating_2xx_appends_exactly_one_audit_event(self, client):
        service = client.service

        def audit_count():
            return len(service.accounts.query_audit())

        headers = login(client, create=True)  # newaccount + login: 2 events
        checks = [
            ("/cynote/cynote/new_notebook", {"title": "nb"}),
            ("/cynote/cynote/new_entry", {"notebook_id": 1, "title": "t", "description": "d"}),
            ("/cynote/cynote/new_comment", {"entry_id": 1, "text": "c"}),
            ("/cynote/cynote/notarize", {"entry_id": 1}),
            ("/cynote/cynote/archive", {"notebook_id": 1}),
            ("/cynote/cynote/unarchive", {"notebook_id": 1}),
            ("/cynote/cynote/generate_signatures", None),
            ("/cynote/savedatabase/backup", None),
            (
                "/cynote/primer/analyze",
                {
                    "left": "ACGT",
                    "right": "TTTTAAAA",
                    "monovalent_mM": 50.0,
                    "divalent_mM": 1.5,
                    "primer_concentration_M": 2.5e-7,
                },
            ),
        ]
        for path, body in checks:
            before = audit_count()
            response = client.post(path, json=body, headers=headers)
            assert response.status_code == 200, (path, response.text)
            assert audit_count() == before + 1, path
