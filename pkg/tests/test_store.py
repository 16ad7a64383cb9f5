import inspect

import pytest

from cynote.errors import (
    ArchivedNotebookError,
    NotFoundError,
    UnsupportedKindError,
    ValidationError,
)
from cynote.models import AuditKind
from cynote.store import NotebookStore

from .conftest import PASSWORD


@pytest.fixture
def store(service):
    service.accounts.create_account("ng", PASSWORD)
    return service.store


class TestNotebooks:
    def test_first_id_is_one(self, store):
        notebook = store.create_notebook("General Journal", "ng")
        assert notebook.id == 1
        assert notebook.archived is False

    def test_ids_are_contiguous(self, store):
        for expected in range(1, 6):
            assert store.create_notebook(f"nb {expected}", "ng").id == expected

    def test_empty_title_rejected(self, store):
        with pytest.raises(ValidationError):
            store.create_notebook("", "ng")

    def test_archive_and_unarchive(self, store):
        store.create_notebook("General Journal", "ng")
        assert store.set_archive_state(1, True, "ng").archived is True
        assert store.set_archive_state(1, False, "ng").archived is False

    def test_archive_twice_is_noop_but_logged(self, service, store):
        store.create_notebook("nb", "ng")
        store.set_archive_state(1, True, "ng")
        store.set_archive_state(1, True, "ng")
        assert store.get_notebook(1).archived is True
        events = service.accounts.query_audit(kind=AuditKind.ARCHIVE)
        assert len(events) == 2

    def test_unknown_notebook(self, store):
        with pytest.raises(NotFoundError):
            store.set_archive_state(99, True, "ng")


class TestEntries:
    def test_create_and_lock_semantics(self, store):
        store.create_notebook("General Journal", "ng")
        entry = store.create_entry(1, "New entry #1", "testing entry", author="ng")
        assert entry.id == 1
        store.set_archive_state(1, True, "ng")
        with pytest.raises(ArchivedNotebookError):
            store.create_entry(1, "locked out", "nope", author="ng")
        store.set_archive_state(1, False, "ng")
        assert store.create_entry(1, "ok again", "yes", author="ng").id == 2

    def test_sequential_ids_differ_by_one(self, store):
        store.create_notebook("nb", "ng")
        first = store.create_entry(1, "a", "a", author="ng")
        second = store.create_entry(1, "b", "b", author="ng")
        assert second.id - first.id == 1

    def test_missing_required_fields_named(self, store):
        store.create_notebook("nb", "ng")
        with pytest.raises(ValidationError) as err:
            store.create_entry(1, "", "", author="ng")
        assert set(err.value.fields) == {"title", "description"}

    def test_unknown_notebook(self, store):
        with pytest.raises(NotFoundError):
            store.create_entry(42, "t", "d", author="ng")

    def test_reverse_chronology_with_id_tiebreak(self, store, clock):
        store.create_notebook("nb", "ng")
        store.create_entry(1, "first", "d", author="ng")
        clock.advance(minutes=5)
        store.create_entry(1, "second", "d", author="ng")
        # same clock instant: id breaks the tie, higher id first
        store.create_entry(1, "third", "d", author="ng")
        titles = [e.title for e in store.list_entries()]
        assert titles == ["third", "second", "first"]

    def test_list_scoped_to_notebook(self, store):
        store.create_notebook("one", "ng")
        store.create_notebook("two", "ng")
        store.create_entry(1, "in one", "d", author="ng")
        store.create_entry(2, "in two", "d", author="ng")
        assert [e.title for e in store.list_entries(2)] == ["in two"]
        assert store.list_entries(1)[0].title == "in one"

    def test_empty_store_lists_empty(self, store):
        assert store.list_entries() == []

    def test_toc_ascending_by_id(self, store, clock):
        store.create_notebook("nb", "ng")
        for title in ("a", "b", "c"):
            store.create_entry(1, title, "d", author="ng")
            clock.advance(seconds=1)
        rows = store.table_of_contents(1)
        assert [r[0] for r in rows] == [1, 2, 3]
        assert [r[1] for r in rows] == ["a", "b", "c"]

    def test_toc_empty_and_unknown(self, store):
        store.create_notebook("nb", "ng")
        assert store.table_of_contents(1) == []
        with pytest.raises(NotFoundError):
            store.table_of_contents(9)


class TestComments:
    def test_append_and_lookup(self, store):
        store.create_notebook("nb", "ng")
        store.create_entry(1, "t", "d", author="ng")
        comment = store.create_comment(1, "follow-up", author="ng")
        assert comment.id == 1
        assert store.list_comments(1)[0].text == "follow-up"

    def test_unknown_entry(self, store):
        with pytest.raises(NotFoundError):
            store.create_comment(99, "text", author="ng")

    def test_blocked_on_archived_notebook(self, store):
        store.create_notebook("nb", "ng")
        store.create_entry(1, "t", "d", author="ng")
        store.set_archive_state(1, True, "ng")
        with pytest.raises(ArchivedNotebookError):
            store.create_comment(1, "locked", author="ng")


class TestNotarizations:
    def test_affix_and_multiplicity(self, store):
        store.create_notebook("nb", "ng")
        store.create_entry(1, "t", "d", author="ng")
        first = store.notarize_entry(1, "ng")
        second = store.notarize_entry(1, "yy")
        assert (first.entry_id, first.notary) == (1, "ng")
        assert [n.id for n in store.list_notarizations(1)] == [first.id, second.id]

    def test_unknown_entry(self, store):
        with pytest.raises(NotFoundError):
            store.notarize_entry(7, "ng")


class TestResults:
    def test_store_and_scope_by_owner(self, store):
        stored = store.store_result("ng", "primer", [("Left primer", "ACGT")])
        assert stored.id == 1
        assert len(store.list_results("ng")) == 1
        assert store.list_results("yy") == []

    def test_statistics_kind_never_persisted(self, store):
        with pytest.raises(UnsupportedKindError):
            store.store_result("ng", "statistics", [("mean", "3")])

    def test_empty_payload_rejected(self, store):
        with pytest.raises(ValidationError):
            store.store_result("ng", "primer", [])


class TestAttachments:
    def test_content_addressed_round_trip(self, store):
        attachment = store.save_attachment("gel.png", b"\x89PNG fake bytes")
        assert attachment.size_bytes == 15
        assert len(attachment.content_digest) == 64
        assert store.read_attachment(attachment) == b"\x89PNG fake bytes"
        again = store.save_attachment("other-name.png", b"\x89PNG fake bytes")
        assert again.stored_path == attachment.stored_path

    def test_attachment_on_entry(self, store):
        store.create_notebook("nb", "ng")
        attachment = store.save_attachment("data.csv", b"a,b\n1,2\n")
        entry = store.create_entry(1, "t", "d", file=attachment, author="ng")
        assert store.get_entry(entry.id).file.content_digest == attachment.content_digest


class TestAuditCoupling:
    def test_every_mutation_emits_exactly_one_event(self, service, store):
        baseline = len(service.accounts.query_audit())
        store.create_notebook("nb", "ng")
        store.create_entry(1, "t", "d", author="ng")
        store.create_comment(1, "c", author="ng")
        store.notarize_entry(1, "ng")
        store.set_archive_state(1, True, "ng")
        store.set_archive_state(1, False, "ng")
        store.store_result("ng", "primer", [("k", "v")])
        events = service.accounts.query_audit()
        assert len(events) - baseline == 7
        kinds = [e.kind for e in events[baseline:]]
        assert kinds == [
            AuditKind.NEW_NOTEBOOK,
            AuditKind.NEW_ENTRY,
            AuditKind.NEW_COMMENT,
            AuditKind.NOTARIZE,
            AuditKind.ARCHIVE,
            AuditKind.UNARCHIVE,
            AuditKind.RESULT_STORED,
        ]

    def test_failed_mutations_do_not_append_content(self, service, store):
        store.create_notebook("nb", "ng")
        before = len(service.accounts.query_audit())
        with pytest.raises(ValidationError):
            store.create_entry(1, "", "", author="ng")
        with pytest.raises(NotFoundError):
            store.create_comment(44, "x", author="ng")
        assert store.list_entries() == []
        assert len(service.accounts.query_audit()) == before


class TestTimestamps:
    def test_non_decreasing_even_if_clock_regresses(self, store, clock):
        store.create_notebook("nb", "ng")
        first = store.create_entry(1, "a", "d", author="ng")
        clock.advance(hours=-2)  # simulated clock regression
        second = store.create_entry(1, "b", "d", author="ng")
        assert second.created_utc >= first.created_utc


class TestConcurrency:
    def test_parallel_writers_keep_ids_gapless(self, store):
        import threading

        store.create_notebook("nb", "ng")
        errors = []

        def writer(tag):
            try:
                for index in range(25):
                    store.create_entry(1, f"t{tag}-{index}", "d", author="ng")
            except Exception as exc:  # pragma: no cover - failure reporting
                errors.append(exc)

        threads = [threading.Thread(target=writer, args=(t,)) for t in range(8)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert not errors
        ids = [e.id for e in store.list_entries()]
        assert sorted(ids) == list(range(1, 201))


class TestSurfaceInventory:
    def test_no_update_or_delete_verbs_for_content(self):
        forbidden = ("update", "delete", "remove", "edit", "amend", "modify", "purge")
        names = [
            name
            for name, _ in inspect.getmembers(NotebookStore, inspect.isfunction)
            if not name.startswith("_")
        ]
        for name in names:
            assert not any(verb in name for verb in forbidden), name
