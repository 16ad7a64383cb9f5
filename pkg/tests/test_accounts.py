import hmac as hmac_module

import pytest

from cynote import accounts as accounts_module
from cynote.errors import (
    ChangePasswordError,
    InvalidCredentialsError,
    NotAuthorizedError,
    NotFoundError,
    PasswordExpiredError,
    PolicyError,
    StaleSessionError,
    UniquenessError,
)
from cynote.models import AuditKind

from .conftest import PASSWORD


class TestCreateAccount:
    def test_bootstrap_account_is_authorized(self, service):
        user = service.accounts.create_account("ng", PASSWORD)
        assert user.authorized is True

    def test_second_account_awaits_authorization(self, service):
        service.accounts.create_account("ng", PASSWORD)
        second = service.accounts.create_account("yy", "p4ssword!")
        assert second.authorized is False

    def test_duplicate_username_rejected_and_logged(self, service):
        service.accounts.create_account("ng", PASSWORD)
        with pytest.raises(UniquenessError):
            service.accounts.create_account("ng", "otherpass1")
        events = service.accounts.query_audit(kind=AuditKind.NEW_ACCOUNT)
        assert len(events) == 2
        assert "duplicate" in events[-1].detail

    def test_usernames_case_sensitive(self, service):
        service.accounts.create_account("ng", PASSWORD)
        assert service.accounts.create_account("NG", PASSWORD).username == "NG"

    def test_weak_password_rejected(self, service):
        with pytest.raises(PolicyError):
            service.accounts.create_account("ng", "short")

    def test_no_plaintext_password_anywhere(self, service):
        service.accounts.create_account("ng", PASSWORD)
        service.accounts.login("ng", PASSWORD)
        with pytest.raises(InvalidCredentialsError):
            service.accounts.login("ng", "wrong-guess-1")
        with service.db.read() as cur:
            for table in ("users", "audit_events"):
                for row in cur.execute(f"SELECT * FROM {table}").fetchall():
                    for value in tuple(row):
                        assert PASSWORD not in str(value)
                        assert "wrong-guess-1" not in str(value)


class TestAuthorization:
    def test_authorize_then_deauthorize(self, service):
        service.accounts.create_account("ng", PASSWORD)
        service.accounts.create_account("yy", "p4ssword!")
        assert service.accounts.authorize_user("ng", "yy").authorized is True
        service.accounts.login("yy", "p4ssword!")
        assert service.accounts.deauthorize_user("ng", "yy").authorized is False
        with pytest.raises(NotAuthorizedError):
            service.accounts.login("yy", "p4ssword!")

    def test_unauthorized_actor_cannot_authorize(self, service):
        service.accounts.create_account("ng", PASSWORD)
        service.accounts.create_account("yy", "p4ssword!")
        service.accounts.create_account("zz", "p4ssword!")
        with pytest.raises(NotAuthorizedError):
            service.accounts.authorize_user("yy", "zz")

    def test_unknown_target(self, service):
        service.accounts.create_account("ng", PASSWORD)
        with pytest.raises(NotFoundError):
            service.accounts.authorize_user("ng", "ghost")

    def test_deauthorize_kills_live_sessions(self, service):
        service.accounts.create_account("ng", PASSWORD)
        service.accounts.create_account("yy", "p4ssword!")
        service.accounts.authorize_user("ng", "yy")
        session = service.accounts.login("yy", "p4ssword!")
        assert service.accounts.authenticate(session.token).username == "yy"
        service.accounts.deauthorize_user("ng", "yy")
        with pytest.raises(StaleSessionError):
            service.accounts.authenticate(session.token)

    def test_deauthorized_user_cannot_mutate_content(self, service):
        service.accounts.create_account("ng", PASSWORD)
        service.accounts.create_account("yy", "p4ssword!")
        service.accounts.authorize_user("ng", "yy")
        service.create_notebook("yy", "their notebook")
        service.accounts.deauthorize_user("ng", "yy")
        with pytest.raises(NotAuthorizedError):
            service.create_notebook("yy", "blocked")
        with pytest.raises(NotAuthorizedError):
            service.create_entry("yy", 1, "t", "d")
        service.accounts.authorize_user("ng", "yy")
        assert service.create_notebook("yy", "allowed again").id == 2


class TestLogin:
    def test_fresh_password_logs_in(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        clock.advance(days=10)
        session = service.accounts.login("ng", PASSWORD)
        assert len(session.token) == 64  # 256-bit hex token
        assert service.accounts.authenticate(session.token).username == "ng"

    def test_uniform_error_hides_user_existence(self, service):
        service.accounts.create_account("ng", PASSWORD)
        with pytest.raises(InvalidCredentialsError) as wrong_pw:
            service.accounts.login("ng", "not-the-password")
        with pytest.raises(InvalidCredentialsError) as unknown:
            service.accounts.login("ghost", "whatever123")
        assert str(wrong_pw.value) == str(unknown.value)

    def test_failure_counter_runs_in_audit_detail(self, service):
        service.accounts.create_account("ng", PASSWORD)
        for _ in range(3):
            with pytest.raises(InvalidCredentialsError):
                service.accounts.login("ng", "badbadbad")
        failures = service.accounts.query_audit(kind=AuditKind.LOGIN_FAILURE)
        assert [f.detail.rsplit(" ", 1)[-1] for f in failures] == ["1", "2", "3"]
        service.accounts.login("ng", PASSWORD)
        with pytest.raises(InvalidCredentialsError):
            service.accounts.login("ng", "badbadbad")
        failures = service.accounts.query_audit(kind=AuditKind.LOGIN_FAILURE)
        assert failures[-1].detail.endswith("consecutive failures: 1")

    def test_aging_gate(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        clock.advance(days=89)
        service.accounts.logout(service.accounts.login("ng", PASSWORD).token)
        clock.advance(days=2)  # now 91 days old
        with pytest.raises(PasswordExpiredError):
            service.accounts.login("ng", PASSWORD)

    def test_exactly_90_days_is_allowed(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        clock.advance(days=90)
        check = service.accounts.password_age_check("ng")
        assert check["age_days"] == pytest.approx(90.0)
        assert check["must_change"] is False
        assert service.accounts.login("ng", PASSWORD).username == "ng"

    def test_age_check_values(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        clock.advance(days=89)
        assert service.accounts.password_age_check("ng")["must_change"] is False
        clock.advance(days=2)
        check = service.accounts.password_age_check("ng")
        assert check["must_change"] is True
        assert check["age_days"] == pytest.approx(91.0)


class TestLogout:
    def test_logout_invalidates_token(self, service):
        service.accounts.create_account("ng", PASSWORD)
        session = service.accounts.login("ng", PASSWORD)
        service.accounts.logout(session.token)
        with pytest.raises(StaleSessionError):
            service.accounts.authenticate(session.token)

    def test_double_logout_errors(self, service):
        service.accounts.create_account("ng", PASSWORD)
        session = service.accounts.login("ng", PASSWORD)
        service.accounts.logout(session.token)
        with pytest.raises(StaleSessionError):
            service.accounts.logout(session.token)

    def test_stale_token_errors(self, service):
        with pytest.raises(StaleSessionError):
            service.accounts.logout("feedfacefeedface")

    def test_session_expiry(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        session = service.accounts.login("ng", PASSWORD)
        clock.advance(minutes=61)
        with pytest.raises(StaleSessionError):
            service.accounts.authenticate(session.token)


class TestChangePassword:
    def test_successful_change_resets_age(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        clock.advance(days=80)
        service.accounts.change_password("ng", PASSWORD, "freshpass1")
        assert service.accounts.password_age_check("ng")["age_days"] == pytest.approx(0.0)
        service.accounts.login("ng", "freshpass1")

    def test_expired_password_recovery_flow(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        clock.advance(days=91)
        with pytest.raises(PasswordExpiredError):
            service.accounts.login("ng", PASSWORD)
        service.accounts.change_password("ng", PASSWORD, "freshpass1")
        assert service.accounts.login("ng", "freshpass1").username == "ng"

    def test_wrong_old_password_reason_logged(self, service):
        service.accounts.create_account("ng", PASSWORD)
        with pytest.raises(ChangePasswordError):
            service.accounts.change_password("ng", "wrongwrong", "freshpass1")
        events = service.accounts.query_audit(kind=AuditKind.PASSWORD_CHANGE_FAILURE)
        assert events[-1].detail == "old password mismatch"

    def test_unknown_user_fails_uniformly(self, service):
        with pytest.raises(ChangePasswordError) as err:
            service.accounts.change_password("ghost", "whatever12", "freshpass1")
        assert str(err.value) == "old password mismatch"

    def test_new_equals_old_rejected(self, service):
        service.accounts.create_account("ng", PASSWORD)
        with pytest.raises(ChangePasswordError):
            service.accounts.change_password("ng", PASSWORD, PASSWORD)
        events = service.accounts.query_audit(kind=AuditKind.PASSWORD_CHANGE_FAILURE)
        assert events[-1].detail == "new password equals old"

    def test_policy_violation_reason_logged(self, service):
        service.accounts.create_account("ng", PASSWORD)
        with pytest.raises(ChangePasswordError):
            service.accounts.change_password("ng", PASSWORD, "tiny")
        events = service.accounts.query_audit(kind=AuditKind.PASSWORD_CHANGE_FAILURE)
        assert events[-1].detail.startswith("policy violation")

    def test_every_attempt_is_audited(self, service):
        service.accounts.create_account("ng", PASSWORD)
        baseline = len(service.accounts.query_audit())
        attempts = 0
        for old, new in (
            (PASSWORD, "freshpass1"),
            ("freshpass1", "freshpass1"),
            ("freshpass1", "nope"),
            ("wrong-old1", "irrelevant1"),
        ):
            attempts += 1
            try:
                service.accounts.change_password("ng", old, new)
            except ChangePasswordError:
                pass
        assert len(service.accounts.query_audit()) - baseline == attempts


class TestDigestHandling:
    def test_verification_uses_constant_time_compare(self, service, monkeypatch):
        service.accounts.create_account("ng", PASSWORD)
        calls = []
        real = hmac_module.compare_digest

        def spy(a, b):
            calls.append(True)
            return real(a, b)

        monkeypatch.setattr(accounts_module.hmac, "compare_digest", spy)
        with pytest.raises(InvalidCredentialsError):
            service.accounts.login("ng", "bad-password-1")
        assert calls, "password comparison must go through hmac.compare_digest"

    def test_salts_are_unique_per_user(self, service):
        service.accounts.create_account("ng", PASSWORD)
        service.accounts.create_account("yy", PASSWORD)
        ng, yy = service.accounts.get_user("ng"), service.accounts.get_user("yy")
        assert ng.salt != yy.salt
        assert ng.password_digest != yy.password_digest
        assert len(bytes.fromhex(ng.salt)) >= 16


class TestConcurrency:
    def test_duplicate_usernames_race_resolves_to_one_user(self, service):
        import threading

        outcomes = []

        def creator():
            try:
                service.accounts.create_account("race", "p4ssword!!")
                outcomes.append("created")
            except UniquenessError:
                outcomes.append("duplicate")

        threads = [threading.Thread(target=creator) for _ in range(6)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert outcomes.count("created") == 1
        with service.db.read() as cur:
            count = cur.execute(
                "SELECT COUNT(*) AS n FROM users WHERE username = 'race'"
            ).fetchone()["n"]
        assert count == 1


class TestSurfaceInventory:
    def test_users_are_never_deleted(self):
        import inspect

        from cynote.accounts import AccountService

        names = [
            name
            for name, _ in inspect.getmembers(AccountService, inspect.isfunction)
            if not name.startswith("_")
        ]
        for name in names:
            assert "delete" not in name and "remove" not in name, name


class TestAuditQuery:
    def test_filters_and_ordering(self, service, clock):
        service.accounts.create_account("ng", PASSWORD)
        service.create_notebook("ng", "nb")
        service.create_entry("ng", 1, "a", "d")
        service.create_entry("ng", 1, "b", "d")
        events = service.accounts.query_audit(kind=AuditKind.NEW_ENTRY)
        assert len(events) == 2
        assert [e.id for e in events] == sorted(e.id for e in events)
        start = events[-1].utc
        clock.advance(days=1)
        later = service.accounts.query_audit(start=start.replace(hour=23))
        assert later == []
        by_actor = service.accounts.query_audit(actor="ng")
        assert all(e.actor == "ng" for e in by_actor)
