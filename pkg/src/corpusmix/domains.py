"""Registrable-domain extraction against a bundled public-suffix snapshot.

The snapshot covers the common multi-label public suffixes; everything else
falls back to the default single-label rule (registrable = last two labels).
Good enough for grouping pages by site without shipping the full suffix list.
"""

from __future__ import annotations

from urllib.parse import urlsplit

# Snapshot of frequent multi-label public suffixes (ICANN section).
_MULTI_LABEL_SUFFIXES = frozenset({
    "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "net.uk", "ltd.uk", "plc.uk", "sch.uk",
    "co.jp", "ne.jp", "or.jp", "ac.jp", "go.jp", "ad.jp", "ed.jp",
    "com.au", "net.au", "org.au", "edu.au", "gov.au", "id.au",
    "co.nz", "net.nz", "org.nz", "ac.nz", "govt.nz", "school.nz",
    "co.za", "org.za", "ac.za", "gov.za", "web.za",
    "com.br", "net.br", "org.br", "gov.br", "edu.br",
    "com.cn", "net.cn", "org.cn", "gov.cn", "edu.cn", "ac.cn",
    "com.mx", "org.mx", "gob.mx", "edu.mx", "net.mx",
    "com.ar", "com.tr", "com.tw", "com.hk", "com.sg", "com.my",
    "co.in", "net.in", "org.in", "ac.in", "gov.in", "edu.in", "res.in",
    "co.kr", "or.kr", "ac.kr", "go.kr", "ne.kr", "re.kr",
    "co.id", "co.th", "com.vn", "com.ph", "com.eg", "com.sa", "com.pk",
    "com.bd", "com.ng", "co.ke", "com.ua", "in.ua", "com.pl", "net.pl",
    "org.pl", "edu.pl", "com.ru", "org.ru", "net.ru", "com.co", "com.pe",
    "com.uy", "com.ve", "com.ec", "com.do", "com.gt", "co.il", "org.il",
    "ac.il", "gov.il", "com.es", "org.es", "nom.es",
})


def _host_of(url_or_host: str) -> str | None:
    candidate = url_or_host.strip()
    if not candidate:
        return None
    if "://" in candidate:
        host = urlsplit(candidate).hostname
    elif candidate.startswith("//"):
        host = urlsplit(candidate).hostname
    else:
        # bare host, possibly with a path or port attached
        host = urlsplit("//" + candidate).hostname
    if not host:
        return None
    return host.rstrip(".").lower()


def registrable_domain(url_or_host: str) -> str | None:
    """Registrable domain of a URL or hostname; None when unparseable.

    IP literals and single-label hosts have no registrable domain.
    """
    host = _host_of(url_or_host)
    if not host:
        return None
    labels = host.split(".")
    if len(labels) < 2 or any(not label for label in labels):
        return None
    if all(label.isdigit() for label in labels):  # IPv4 literal
        return None
    last_two = ".".join(labels[-2:])
    if last_two in _MULTI_LABEL_SUFFIXES:
        if len(labels) < 3:
            return None  # the host *is* a public suffix
        return ".".join(labels[-3:])
    return last_two
