"""Scope filtering: which classified URIs count toward the analytics.

URIs are excluded for a non-HTTP(S) scheme, a localhost/private-range
host, a publication-pointing host (arXiv, Elsevier RefHub, Crossmark), or
a DOI outside the data-repository allowlist.  Rules apply in that fixed
order and the first match decides.
"""

from __future__ import annotations

import ipaddress
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from urllib.parse import urlsplit

__all__ = [
    "ScopeReason",
    "ScopeVerdict",
    "ScopePolicy",
    "DEFAULT_POLICY",
    "host_of",
    "split_port",
    "is_in_scope",
    "is_private_or_local",
]


class ScopeReason(Enum):
    SCHEME_EXCLUDED = "scheme_excluded"
    LOCAL_OR_PRIVATE_HOST = "local_or_private_host"
    PUBLICATION_LINK = "publication_link"
    DOI_EXCLUDED = "doi_excluded"
    DOI_ALLOWLISTED = "doi_allowlisted"
    ACCEPTED = "accepted"


_IN_SCOPE_REASONS = frozenset({ScopeReason.ACCEPTED, ScopeReason.DOI_ALLOWLISTED})


@dataclass(frozen=True)
class ScopeVerdict:
    in_scope: bool
    reason: ScopeReason

    @classmethod
    def from_reason(cls, reason: ScopeReason) -> "ScopeVerdict":
        return cls(reason in _IN_SCOPE_REASONS, reason)


# Default ports per scheme; a host carrying its scheme's default port is
# reported without the port, any other port is kept.
_DEFAULT_PORTS = {"http": "80", "https": "443", "ftp": "21", "ws": "80", "wss": "443"}

_DEFAULT_PRIVATE_RANGES = (
    "127.0.0.0/8",      # loopback
    "169.254.0.0/16",   # link-local
    "10.0.0.0/8",       # private blocks
    "172.16.0.0/12",
    "192.168.0.0/16",
    "::1/128",
    "fe80::/10",
    "fc00::/7",
)


@dataclass(frozen=True)
class ScopePolicy:
    """Immutable filter configuration with paper-faithful defaults."""

    allowed_schemes: frozenset[str] = frozenset({"http", "https"})
    publication_hosts: frozenset[str] = frozenset(
        {"arxiv.org", "refhub.elsevier.com", "crossmark.crossref.org"}
    )
    doi_hosts: frozenset[str] = frozenset({"doi.org", "dx.doi.org"})
    # DOI registrant prefixes resolved offline: Zenodo, Dryad, figshare, OSF.
    doi_allow_prefixes: frozenset[str] = frozenset(
        {"10.5281", "10.5061", "10.6084", "10.17605"}
    )
    private_ranges: tuple[str, ...] = _DEFAULT_PRIVATE_RANGES

    def networks(self) -> tuple[ipaddress.IPv4Network | ipaddress.IPv6Network, ...]:
        return tuple(ipaddress.ip_network(r) for r in self.private_ranges)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScopePolicy":
        """Load a policy JSON file; absent keys keep their defaults."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        kwargs = {}
        for key in ("allowed_schemes", "publication_hosts", "doi_hosts", "doi_allow_prefixes"):
            if key in data:
                kwargs[key] = frozenset(str(v).lower() for v in data[key])
        if "private_ranges" in data:
            kwargs["private_ranges"] = tuple(str(v) for v in data["private_ranges"])
        return cls(**kwargs)


DEFAULT_POLICY = ScopePolicy()


def _authority_of(uri: str) -> str:
    netloc = urlsplit(uri).netloc
    # Strip userinfo; the rightmost @ separates it from the host.
    _, _, hostport = netloc.rpartition("@")
    return hostport


def split_port(host: str) -> tuple[str, str | None]:
    """Split an optional trailing port off a host string.

    Bracketed IPv6 literals keep their brackets: ``[::1]:8080`` splits into
    (``[::1]``, ``8080``).
    """
    if host.startswith("["):
        end = host.find("]")
        if end != -1:
            rest = host[end + 1 :]
            if rest.startswith(":"):
                return host[: end + 1], rest[1:]
            return host[: end + 1], None
        return host, None
    head, sep, tail = host.rpartition(":")
    if sep and tail.isdigit():
        return head, tail
    return host, None


def host_of(uri: str) -> str:
    """Extract the lowercased host from a URI.

    The scheme's default port is stripped, other ports are kept as
    ``host:port``.  A leading ``www.`` is preserved and IP-literal hosts
    are returned verbatim (lowercased).
    """
    parts = urlsplit(uri)
    hostport = _authority_of(uri)
    if not hostport:
        raise ValueError(f"URI has no host: {uri!r}")
    host, port = split_port(hostport.lower())
    if not host:
        raise ValueError(f"URI has no host: {uri!r}")
    if port is not None and port != _DEFAULT_PORTS.get(parts.scheme.lower()):
        return f"{host}:{port}"
    return host


def is_private_or_local(host: str, policy: ScopePolicy = DEFAULT_POLICY) -> bool:
    """True for localhost, loopback, link-local, and private-range hosts."""
    bare, _ = split_port(host.lower())
    if bare == "localhost" or bare.endswith(".localhost"):
        return True
    if bare.startswith("[") and bare.endswith("]"):
        bare = bare[1:-1]
    try:
        addr = ipaddress.ip_address(bare)
    except ValueError:
        return False
    return any(addr in net for net in policy.networks())


def _host_matches(host: str, pattern: str) -> bool:
    """Exact host or any subdomain of it (match on label boundaries)."""
    bare, _ = split_port(host)
    return bare == pattern or bare.endswith("." + pattern)


def _doi_prefix_of(uri: str) -> str:
    """First path segment of a DOI URI, e.g. ``10.5281``; empty if none."""
    path = urlsplit(uri).path
    segments = [s for s in path.split("/") if s]
    return segments[0] if segments else ""


def is_in_scope(uri: str, policy: ScopePolicy = DEFAULT_POLICY) -> ScopeVerdict:
    """Apply the scope rules in fixed order and return the first verdict.

    Never raises: anything unparseable is excluded under the scheme rule.
    """
    try:
        scheme = urlsplit(uri).scheme.lower()
    except ValueError:
        return ScopeVerdict.from_reason(ScopeReason.SCHEME_EXCLUDED)
    if scheme not in policy.allowed_schemes:
        return ScopeVerdict.from_reason(ScopeReason.SCHEME_EXCLUDED)
    try:
        host = host_of(uri)
    except ValueError:
        return ScopeVerdict.from_reason(ScopeReason.SCHEME_EXCLUDED)
    if is_private_or_local(host, policy):
        return ScopeVerdict.from_reason(ScopeReason.LOCAL_OR_PRIVATE_HOST)
    if any(_host_matches(host, p) for p in sorted(policy.publication_hosts)):
        return ScopeVerdict.from_reason(ScopeReason.PUBLICATION_LINK)
    if any(_host_matches(host, p) for p in sorted(policy.doi_hosts)):
        if _doi_prefix_of(uri) in policy.doi_allow_prefixes:
            return ScopeVerdict.from_reason(ScopeReason.DOI_ALLOWLISTED)
        return ScopeVerdict.from_reason(ScopeReason.DOI_EXCLUDED)
    return ScopeVerdict.from_reason(ScopeReason.ACCEPTED)
